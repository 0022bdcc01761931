"""
Score every synthetic fixture family and print the per-object scores.
Useful as a smoke run after touching the planner or the perturbations.
"""

import os
import sys

import click
from rich.console import Console
from rich.table import Table

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.models.report import RunManifest  # noqa: E402
from src.scoring import ImportanceScorer, normalize_reports  # noqa: E402
from src.synth import SynthKind, SynthSpec, generate  # noqa: E402
from src.utils.config import Config  # noqa: E402
from src.utils.logger import setup_logger  # noqa: E402

console = Console()


def _fmt(value):
    return "-" if value is None else f"{value:.3f}"


@click.command()
@click.option("--seeds", default=3, type=click.IntRange(min=1), help="Seeds per kind")
@click.option("--log-level", default="WARNING")
def run_benchmark(seeds, log_level):
    """Generate, score and tabulate the synthetic suite."""
    logger = setup_logger(name="synthetic_benchmark", level=log_level)
    config = Config.from_env()
    scorer = ImportanceScorer(config.scoring)

    scenes = [
        generate(SynthSpec(kind=kind, seed=seed))
        for kind in SynthKind
        for seed in range(seeds)
    ]
    logger.info(f"Scoring {len(scenes)} synthetic scenes")
    reports = [scorer.score_scene(scene) for scene in scenes]
    manifest = RunManifest(
        tool_version="benchmark",
        input_paths=tuple(scene.scene_id for scene in scenes),
        input_hash="",
        scoring=config.scoring,
    )
    batch = normalize_reports(reports, manifest)

    table = Table(title="Synthetic benchmark", header_style="bold magenta")
    for column in ("scene", "object", "kind", "raw_rs", "raw_vs", "is", "norm_ps"):
        table.add_column(column)
    for scene in batch.scenes:
        for record in scene.objects:
            table.add_row(
                scene.scene_id,
                record.id,
                record.kind.value,
                _fmt(record.raw_rs),
                "-" if record.raw_vs is None else str(int(record.raw_vs)),
                _fmt(record.importance),
                _fmt(record.norm_ps),
            )
    console.print(table)


if __name__ == "__main__":
    run_benchmark()
