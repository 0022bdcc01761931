"""Tests for the ImportanceOrchestrator."""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

from src import __version__
from src.models.report import BatchReport
from src.orchestrator import ImportanceOrchestrator, hash_inputs
from src.storage import dump_document, load_model, load_scene
from src.synth import SynthKind, SynthSpec
from src.utils.config import Config, EvalConfig, ScoringConfig
from src.utils.errors import EvaluationError, SceneValidationError


@pytest.fixture
def orchestrator():
    """Single-process orchestrator with default scoring."""
    return ImportanceOrchestrator(Config(workers=1))


@pytest.fixture
def scene_paths(scene_file, lead_follow_scene, jaywalker_scene):
    """Two scenario files on disk."""
    return [scene_file(lead_follow_scene), scene_file(jaywalker_scene)]


@pytest.fixture
def annotation_file(write_json):
    """Annotations for the lead-follow and jaywalker scenes."""

    def row(scene_id, object_id, count):
        return {
            "scene_id": scene_id,
            "object_id": object_id,
            "annotator_count": count,
            "total_annotators": 5,
        }

    return write_json(
        {
            "format_version": "1.0",
            "records": [
                row("lead_follow-0", "lead", 5),
                row("lead_follow-0", "parked_0", 0),
                row("jaywalker-0", "ped_near", 4),
                row("jaywalker-0", "ped_far", 1),
            ],
        },
        "annotations.json",
    )


def test_score_batch(orchestrator, scene_paths):
    """Test scoring two files gives a dataset-normalized report."""
    batch = orchestrator.score(scene_paths)

    assert [s.scene_id for s in batch.scenes] == ["lead_follow-0", "jaywalker-0"]
    assert batch.normalization_scope == "dataset"
    assert batch.manifest.tool_version == __version__
    assert batch.manifest.input_paths == tuple(scene_paths)
    assert batch.manifest.input_hash == hash_inputs(scene_paths)
    assert batch.manifest.scoring == ScoringConfig()


def test_score_requires_inputs(orchestrator):
    """Test an empty batch is rejected."""
    with pytest.raises(ValueError, match="at least one scenario file"):
        orchestrator.score([])


def test_duplicate_scene_ids(orchestrator, scene_file, lead_follow_scene):
    """Test two files carrying the same scene id are refused."""
    first = scene_file(lead_follow_scene, "a.json")
    second = scene_file(lead_follow_scene, "b.json")
    with pytest.raises(SceneValidationError, match="duplicate scene_id"):
        orchestrator.score([first, second])


def test_hash_depends_on_order(scene_paths):
    """Test the input hash is order sensitive."""
    assert len(hash_inputs(scene_paths)) == 64
    assert hash_inputs(scene_paths) != hash_inputs(scene_paths[::-1])


def test_score_to_file_is_reproducible(orchestrator, scene_paths, tmp_path):
    """Test two runs write byte-identical reports."""
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    orchestrator.score_to_file(scene_paths, str(first))
    orchestrator.score_to_file(scene_paths, str(second))
    assert first.read_bytes() == second.read_bytes()
    assert isinstance(load_model(str(first), BatchReport), BatchReport)


def test_parallel_scoring_matches_serial(scene_paths):
    """Test the worker pool keeps scene order and results."""
    serial = ImportanceOrchestrator(Config(workers=1)).score(scene_paths)
    parallel = ImportanceOrchestrator(Config(workers=2)).score(scene_paths)
    assert dump_document(parallel) == dump_document(serial)


def test_external_backend_is_never_pooled(scene_paths):
    """Test the external predictor runs in-process."""
    config = Config(
        workers=4,
        scoring=ScoringConfig(predictor_backend="external", predictor_command="x"),
    )
    orchestrator = ImportanceOrchestrator(config)
    scenes = orchestrator.load_scenes(scene_paths)
    with patch("src.orchestrator.ProcessPoolExecutor") as pool, patch(
        "src.orchestrator.ImportanceScorer"
    ) as scorer:
        orchestrator._score_all(scenes)
    pool.assert_not_called()
    assert scorer.return_value.score_scene.call_count == 2


def test_evaluate(orchestrator, scene_paths, annotation_file, tmp_path):
    """Test evaluating a written report."""
    report_path = str(tmp_path / "report.json")
    orchestrator.score_to_file(scene_paths, report_path)

    result = orchestrator.evaluate(report_path, annotation_file)

    assert result.result.ap == 1.0
    assert result.result.n_positive == 2
    assert result.report_manifest.input_paths == tuple(scene_paths)
    assert result.manifest.input_paths == (report_path, annotation_file)
    assert result.manifest.evaluation == EvalConfig()


def test_evaluate_refuses_other_scoring(
    orchestrator, scene_paths, annotation_file, tmp_path
):
    """Test a report scored differently from the expected config is refused."""
    report_path = str(tmp_path / "report.json")
    orchestrator.score_to_file(scene_paths, report_path)

    with pytest.raises(EvaluationError, match="different configuration"):
        orchestrator.evaluate(
            report_path, annotation_file, expected_scoring=ScoringConfig(tau=3.0)
        )
    same = orchestrator.evaluate(
        report_path, annotation_file, expected_scoring=ScoringConfig()
    )
    assert same.result.ap == 1.0


def test_evaluate_checks_scene_files(
    orchestrator, scene_paths, annotation_file, tmp_path
):
    """Test annotations must name objects of the given scenario files."""
    report_path = str(tmp_path / "report.json")
    orchestrator.score_to_file(scene_paths, report_path)

    result = orchestrator.evaluate(
        report_path, annotation_file, scene_paths=scene_paths
    )
    assert result.result.n_negative == 2

    with pytest.raises(EvaluationError, match="jaywalker-0/ped_far"):
        orchestrator.evaluate(
            report_path, annotation_file, scene_paths=scene_paths[:1]
        )


def test_generate(orchestrator, tmp_path):
    """Test generated scenes are written as scenario files."""
    out = tmp_path / "scenes" / "adjacent.json"
    scene = orchestrator.generate(
        SynthSpec(kind=SynthKind.ADJACENT_LANE, seed=2), str(out)
    )
    assert scene.scene_id == "adjacent_lane-2"
    assert load_scene(str(out)) == scene


def test_render(orchestrator, scene_paths, tmp_path):
    """Test drawing one scene of a report."""
    report_path = str(tmp_path / "report.json")
    orchestrator.score_to_file(scene_paths, report_path)

    path = orchestrator.render(
        scene_paths[0], report_path, 0.5, str(tmp_path / "lead.svg")
    )
    assert Path(path).exists()
    assert "<svg" in Path(path).read_text(encoding="utf-8")


def test_render_scene_not_in_report(
    orchestrator, scene_paths, scene_file, adjacent_lane_scene, tmp_path
):
    """Test drawing a scene the report never scored."""
    report_path = str(tmp_path / "report.json")
    orchestrator.score_to_file(scene_paths, report_path)
    with pytest.raises(SceneValidationError, match="adjacent_lane-0"):
        orchestrator.render(
            scene_file(adjacent_lane_scene), report_path, 0.5, str(tmp_path / "x.svg")
        )


def test_get_summary(orchestrator, scene_paths):
    """Test the summary names counts and configuration."""
    summary = orchestrator.get_summary(orchestrator.score(scene_paths))
    assert "Scenes: 2" in summary
    assert "Objects: 5" in summary
    assert "Normalization: dataset" in summary
    assert "hard_stop, speed_up, lane_change_left, lane_change_right" in summary
    assert "Pedestrians: distance" in summary


def test_written_report_round_trips(orchestrator, scene_paths, tmp_path):
    """Test the report on disk is the report returned."""
    out = tmp_path / "report.json"
    batch = orchestrator.score_to_file(scene_paths, str(out))
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["normalization_scope"] == "dataset"
    assert load_model(str(out), BatchReport) == batch
