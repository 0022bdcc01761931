"""Main orchestrator for the scoring, evaluation and rendering pipelines."""

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .evaluation import evaluate_dataset, load_annotations
from .models.annotations import AnnotationSet
from .models.report import BatchReport, EvalReport, RunManifest, SceneReport
from .models.scene import Scene
from .publisher import ReportPublisher
from .renderer import SceneRenderer
from .scoring import ImportanceScorer, normalize_reports
from .storage import load_model, load_scene, save_scene
from .synth import SynthSpec, generate
from .utils import Config
from .utils.config import EvalConfig, ScoringConfig
from .utils.errors import EvaluationError, SceneValidationError


def hash_inputs(paths: Sequence[str]) -> str:
    """SHA-256 over the input file contents, in order."""
    digest = hashlib.sha256()
    for path in paths:
        data = Path(path).read_bytes()
        digest.update(len(data).to_bytes(8, "big"))
        digest.update(data)
    return digest.hexdigest()


def _score_worker(job: Tuple[Scene, ScoringConfig]) -> SceneReport:
    scene, config = job
    return ImportanceScorer(config).score_scene(scene)


class ImportanceOrchestrator:
    """Orchestrates loading, scoring, normalization and evaluation."""

    def __init__(self, config: Optional[Config] = None):
        """Initialize the orchestrator.

        Args:
            config: Configuration object
        """
        self.config = config or Config()
        self.logger = logging.getLogger(__name__)
        self.publisher = ReportPublisher()
        self.renderer = SceneRenderer()

        self.logger.info("Importance orchestrator initialized")

    def load_scenes(self, paths: Sequence[str]) -> List[Scene]:
        """Load scenario files and check their scene ids are unique."""
        scenes = [load_scene(path) for path in paths]
        seen = set()
        for path, scene in zip(paths, scenes):
            if scene.scene_id in seen:
                raise SceneValidationError(
                    f"{path}: duplicate scene_id '{scene.scene_id}' in batch"
                )
            seen.add(scene.scene_id)
        return scenes

    def _score_all(self, scenes: Sequence[Scene]) -> List[SceneReport]:
        scoring = self.config.scoring
        workers = min(self.config.workers, len(scenes))
        if workers <= 1 or scoring.predictor_backend == "external":
            scorer = ImportanceScorer(scoring)
            return [scorer.score_scene(scene) for scene in scenes]

        self.logger.info(f"Scoring {len(scenes)} scenes on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map keeps input order regardless of completion order
            return list(pool.map(_score_worker, [(s, scoring) for s in scenes]))

    def score(self, paths: Sequence[str]) -> BatchReport:
        """Score a batch of scenario files with batch-level normalization.

        Args:
            paths: Scenario file paths, in output order

        Returns:
            Normalized BatchReport with its RunManifest
        """
        if not paths:
            raise ValueError("at least one scenario file is required")

        self.logger.info(f"Stage 1/3: Loading {len(paths)} scenario files...")
        scenes = self.load_scenes(paths)

        self.logger.info("Stage 2/3: Scoring objects...")
        reports = self._score_all(scenes)

        self.logger.info("Stage 3/3: Normalizing across the batch...")
        manifest = RunManifest(
            tool_version=__version__,
            input_paths=tuple(str(p) for p in paths),
            input_hash=hash_inputs(paths),
            scoring=self.config.scoring,
        )
        batch = normalize_reports(reports, manifest)
        n_objects = sum(len(r.objects) for r in batch.scenes)
        self.logger.info(f"Scored {n_objects} objects in {len(scenes)} scenes")
        return batch

    def score_to_file(self, paths: Sequence[str], out: str) -> BatchReport:
        """Score a batch and write the report document."""
        batch = self.score(paths)
        self.publisher.save_document(batch, out)
        return batch

    def evaluate(
        self,
        report_path: str,
        annotation_path: str,
        eval_config: Optional[EvalConfig] = None,
        expected_scoring: Optional[ScoringConfig] = None,
        scene_paths: Sequence[str] = (),
    ) -> EvalReport:
        """Evaluate a scored report against annotation counts.

        Args:
            report_path: BatchReport document
            annotation_path: AnnotationSet document
            eval_config: Thresholds, category filter and method
            expected_scoring: When given, the report must have been scored
                with exactly this configuration
            scene_paths: Optional scenario files the annotations must match

        Returns:
            EvalReport with metrics and provenance
        """
        eval_config = eval_config or self.config.evaluation
        report = load_model(report_path, BatchReport)
        annotations = load_annotations(annotation_path)

        if expected_scoring is not None and report.manifest.scoring != expected_scoring:
            raise EvaluationError(
                "Report was scored with a different configuration than the one "
                "given to eval"
            )
        if scene_paths:
            self.check_annotations(annotations, self.load_scenes(scene_paths))

        result = evaluate_dataset(report, annotations, eval_config)
        manifest = RunManifest(
            tool_version=__version__,
            input_paths=(str(report_path), str(annotation_path)),
            input_hash=hash_inputs([report_path, annotation_path]),
            evaluation=eval_config,
        )
        return EvalReport(
            manifest=manifest, report_manifest=report.manifest, result=result
        )

    def check_annotations(
        self, annotations: AnnotationSet, scenes: Sequence[Scene]
    ) -> None:
        """Every annotated (scene, object) must exist in the scenario files."""
        known = {
            (scene.scene_id, agent_id)
            for scene in scenes
            for agent_id in scene.agent_ids()
        }
        missing = sorted(r.key for r in annotations.records if r.key not in known)
        if missing:
            listed = ", ".join(f"{s}/{o}" for s, o in missing)
            raise EvaluationError(
                f"Annotated objects not in the scenario files: {listed}"
            )

    def generate(
        self, spec: SynthSpec, out: str, scene_id: Optional[str] = None
    ) -> Scene:
        """Generate a synthetic scene and write it as a scenario file."""
        scene = generate(spec, scene_id=scene_id)
        save_scene(scene, out)
        return scene

    def render(
        self,
        scene_path: str,
        report_path: str,
        threshold: float,
        out: str,
        method: str = "ours",
    ) -> Path:
        """Draw one scene of a report to an SVG file."""
        scene = load_scene(scene_path)
        report = load_model(report_path, BatchReport)
        try:
            scene_report = report.scene(scene.scene_id)
        except KeyError as e:
            raise SceneValidationError(
                f"Scene '{scene.scene_id}' is not in report {report_path}"
            ) from e
        svg = self.renderer.render(scene, scene_report, threshold, method)
        return self.publisher.save_svg(svg, out)

    def get_summary(self, batch: BatchReport) -> str:
        """Generate a human-readable summary of a scored batch.

        Args:
            batch: Normalized report

        Returns:
            Formatted summary string
        """
        n_objects = sum(len(scene.objects) for scene in batch.scenes)
        collisions = sum(
            1 for scene in batch.scenes for r in scene.objects if r.collision
        )
        scoring = batch.manifest.scoring
        enabled = ", ".join(k.value for k in scoring.perturbation.enabled) or "none"

        summary = f"""
Importance Scoring Summary
==========================

Scenes: {len(batch.scenes)}
Objects: {n_objects}
Predicted collisions: {collisions}
Normalization: {batch.normalization_scope}

Configuration:
- tau: {scoring.tau} m
- Perturbations: {enabled}
- Ego perturbation: {"on" if scoring.perturbation.perturb_ego else "off"}
- Index weighting: {"on" if scoring.index_weighting else "off"}
- Pedestrians: {scoring.pedestrian_method}
"""
        return summary
