#!/usr/bin/env python3
"""Example script: generate two synthetic scenes, score them, draw one."""

import tempfile
from pathlib import Path

from src.orchestrator import ImportanceOrchestrator
from src.synth import SynthKind, SynthSpec
from src.utils import Config, setup_logger


def main():
    """Run an example scoring workflow."""
    logger = setup_logger(level="INFO")

    print("=" * 60)
    print("Counterfactual Importance - Example")
    print("=" * 60)

    try:
        config = Config.from_env()
        orchestrator = ImportanceOrchestrator(config)

        with tempfile.TemporaryDirectory() as workdir:
            root = Path(workdir)
            paths = []
            for kind in (SynthKind.LEAD_FOLLOW, SynthKind.JAYWALKER):
                path = root / f"{kind.value}.json"
                orchestrator.generate(SynthSpec(kind=kind, seed=0), str(path))
                paths.append(str(path))

            report_path = root / "report.json"
            batch = orchestrator.score_to_file(paths, str(report_path))
            print(orchestrator.get_summary(batch))

            for scene in batch.scenes:
                print(f"\n{scene.scene_id}")
                for record in scene.objects:
                    value = record.importance
                    if value is None:
                        value = record.norm_ps
                    print(f"  {record.id:<10} {record.kind.value:<10} {value:.3f}")

            svg = orchestrator.render(
                paths[0], str(report_path), 0.5, str(Path("output") / "lead.svg")
            )
            print(f"\nDrawing saved to: {svg}")

    except ValueError as e:
        print(f"\nConfiguration Error: {str(e)}")
    except Exception:
        logger.exception("An error occurred")


if __name__ == "__main__":
    main()
