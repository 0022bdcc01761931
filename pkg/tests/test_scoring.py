"""Tests for removal, velocity and pedestrian scoring."""

from unittest.mock import Mock

import numpy as np
import pytest

from src.kinds import AgentKind
from src.models.report import RunManifest
from src.models.scene import Trajectory
from src.scoring import (
    BASELINES,
    ImportanceScorer,
    apply_overrides,
    baseline_everything,
    baseline_inverse_distance,
    closest_approach,
    collision_index,
    combine,
    normalize,
    normalize_reports,
    pedestrian_score,
    removal_score,
    score_scene,
    velocity_score,
)
from src.synth import make_agent
from src.utils.config import PerturbationConfig, ScoringConfig
from src.utils.errors import SceneValidationError


@pytest.fixture
def manifest():
    """Minimal provenance for normalized batches."""
    return RunManifest(tool_version="test", input_paths=(), input_hash="")


def _xs(xs, y=0.0):
    xs = np.asarray(xs, dtype=float)
    return Trajectory(np.column_stack([xs, np.full_like(xs, y)]), 0.25)


def test_removal_score_identity(straight_trajectory):
    """Test identical trajectories score 0."""
    assert removal_score(straight_trajectory, straight_trajectory) == 0.0


def test_removal_score_uniform_offset(straight_trajectory):
    """Test a uniform (0.5, 0) offset over K = 20 gives 20 * 0.25."""
    shifted = Trajectory(straight_trajectory.points + [0.5, 0.0], 0.25)
    assert removal_score(straight_trajectory, shifted) == 5.0


def test_removal_score_single_waypoint(straight_trajectory):
    """Test a single (3, 4) offset gives 25."""
    points = straight_trajectory.points.copy()
    points[7] += [3.0, 4.0]
    assert removal_score(straight_trajectory, Trajectory(points, 0.25)) == 25.0


def test_removal_score_alignment(straight_trajectory):
    """Test trajectories must share length and step."""
    with pytest.raises(ValueError, match="length mismatch"):
        removal_score(straight_trajectory, _xs([1.0, 2.0]))
    with pytest.raises(ValueError, match="dt mismatch"):
        removal_score(
            straight_trajectory, Trajectory(straight_trajectory.points, 0.5)
        )


def test_collision_index_closing():
    """Test ego x = k against agent x = 10 - k collides at k = 5."""
    k = np.arange(11)
    ego, agent = _xs(k), _xs(10 - k)
    assert closest_approach(ego, agent) == (5, 0.0)
    assert collision_index(ego, agent, 2.0) == 5


def test_collision_index_parallel_and_immediate():
    """Test parallel lanes never collide and coincident starts collide at 0."""
    k = np.arange(20)
    assert collision_index(_xs(k), _xs(k, y=5.0), 2.0) is None
    assert collision_index(_xs(k), _xs(-k), 2.0) == 0


def test_collision_index_boundary_is_exclusive():
    """Test a closest approach exactly at tau is not a collision."""
    k = np.arange(5)
    assert collision_index(_xs(k), _xs(k, y=2.0), 2.0) is None


def test_closest_approach_near_ties_go_to_smaller_index():
    """Test distances equal up to rounding noise count as a tie."""
    ego = _xs(np.zeros(4))
    agent = Trajectory(
        np.array([[5.0, 0.0], [1.0 + 1e-13, 0.0], [1.0, 0.0], [4.0, 0.0]]), 0.25
    )
    index, distance = closest_approach(ego, agent)
    assert index == 1
    assert distance == pytest.approx(1.0)


def test_velocity_score_no_collision():
    """Test no colliding pair scores -K."""
    k = np.arange(20)
    raw_vs, info = velocity_score(
        [("predicted", _xs(k))], [("predicted", _xs(k, y=5.0))]
    )
    assert raw_vs == -20
    assert info is None


def test_velocity_score_soonest_pair():
    """Test the soonest collision across all pairs wins."""
    k = np.arange(20)
    late = _xs(30 - 2 * k)  # meets ego x = k at k = 10
    soon = _xs(15 - 2 * k)  # meets at k = 5
    raw_vs, info = velocity_score(
        [("predicted", _xs(k))], [("predicted", late), ("speed_up", soon)]
    )
    assert raw_vs == -5
    assert info.agent_variant == "speed_up"
    assert info.ego_variant == "predicted"
    assert info.index == 5
    assert info.distance == 0.0


def test_velocity_score_without_index_weighting():
    """Test every collision scores 0 when timing is ignored."""
    k = np.arange(20)
    config = ScoringConfig(index_weighting=False)
    raw_vs, info = velocity_score(
        [("predicted", _xs(k))], [("predicted", _xs(30 - 2 * k))], config
    )
    assert raw_vs == 0
    assert info.index == 10


def test_velocity_score_monotone_in_collision_time():
    """Test a sooner collision gives a strictly greater score."""
    k = np.arange(20)
    ego = [("predicted", _xs(k))]
    sooner, _ = velocity_score(ego, [("predicted", _xs(12 - 2 * k))])
    later, _ = velocity_score(ego, [("predicted", _xs(24 - 2 * k))])
    assert sooner > later


def test_velocity_score_requires_variants():
    """Test empty variant lists are rejected."""
    with pytest.raises(ValueError, match="must not be empty"):
        velocity_score([], [("predicted", _xs([0.0]))])


def test_normalize():
    """Test min-max normalization and its degenerate cases."""
    assert normalize([0, 5, 10]) == [0.0, 0.5, 1.0]
    assert normalize([3, 3, 3]) == [0.0, 0.0, 0.0]
    assert normalize([7]) == [0.0]
    assert normalize([]) == []


def test_combine():
    """Test importance is the larger normalized score."""
    assert combine(0.3, 0.7) == 0.7
    assert combine(0.0, 0.0) == 0.0
    assert combine(0.4, 0.4) == 0.4
    assert combine(0.6, 0.0) == 0.6
    with pytest.raises(ValueError, match="norm_vs must be in"):
        combine(0.5, 1.5)


def test_pedestrian_score():
    """Test negative squared distance to the ego."""
    ego = make_agent("ego", (0.0, 0.0), 0.0, 8.0)
    ped = make_agent("p", (3.0, 4.0), 0.0, 0.0, AgentKind.PEDESTRIAN)
    on_ego = make_agent("q", (0.0, 0.0), 0.0, 0.0, AgentKind.PEDESTRIAN)
    assert pedestrian_score(ped, ego) == -25.0
    assert pedestrian_score(on_ego, ego) == 0.0

    car = make_agent("c", (3.0, 4.0), 0.0, 0.0)
    with pytest.raises(ValueError, match="not a pedestrian"):
        pedestrian_score(car, ego)


def test_baselines(make_scene, vehicle):
    """Test the geometric baselines."""
    scene = make_scene(
        [vehicle("a", (3.0, 4.0)), vehicle("b", (0.0, 0.5)), vehicle("c", (-9.0, 0))]
    )
    assert baseline_everything(scene) == {"a": 1.0, "b": 1.0, "c": 1.0}
    assert baseline_inverse_distance(scene) == {"a": -5.0, "b": -0.5, "c": -9.0}
    assert baseline_everything(make_scene()) == {}


def test_baselines_share_per_object_scores(make_scene, vehicle):
    """Test the scene baselines and the per-object table agree."""
    scene = make_scene([vehicle("a", (3.0, 4.0)), vehicle("b", (-6.0, 8.0))])
    assert baseline_everything(scene) == {
        "a": BASELINES["everything"](5.0),
        "b": BASELINES["everything"](10.0),
    }
    assert baseline_inverse_distance(scene) == {
        "a": BASELINES["inverse_distance"](5.0),
        "b": BASELINES["inverse_distance"](10.0),
    }


def test_apply_overrides(lead_follow_scene):
    """Test horizon and dt overrides replace the scene values."""
    assert apply_overrides(lead_follow_scene, ScoringConfig()) is lead_follow_scene
    scene = apply_overrides(lead_follow_scene, ScoringConfig(horizon=8, dt=0.25))
    assert scene.horizon == 8
    assert scene.dt == 0.25
    assert scene.agents == lead_follow_scene.agents


def test_apply_overrides_revalidates_history_spacing(lead_follow_scene):
    """Test a dt override that no longer matches the history is rejected."""
    with pytest.raises(SceneValidationError, match="spaced at dt=0.5"):
        apply_overrides(lead_follow_scene, ScoringConfig(dt=0.5))


def test_score_empty_scene(empty_scene):
    """Test a scene without agents yields an empty report."""
    report = score_scene(empty_scene)
    assert report.scene_id == "empty"
    assert report.objects == ()


def test_score_lead_follow(lead_follow_scene):
    """Test the stopped lead matters and the parked cars do not."""
    report = score_scene(lead_follow_scene)
    lead = report.record("lead")
    assert lead.raw_rs > 0
    assert -20 < lead.raw_vs <= 0
    assert lead.collision is not None

    for parked in ("parked_0", "parked_1"):
        record = report.record(parked)
        assert record.raw_rs == 0.0
        assert record.raw_vs == -20
        assert record.collision is None
        assert record.norm_rs is None


def test_score_far_off_route_vehicle(make_scene, vehicle):
    """Test a parked car 50 m off the route scores nothing."""
    report = score_scene(make_scene([vehicle("far", (20.0, 50.0))]))
    record = report.record("far")
    assert record.raw_rs == 0.0
    assert record.raw_vs == -20
    assert record.distance == pytest.approx(np.hypot(20.0, 50.0))


def test_score_respects_horizon_override(lead_follow_scene):
    """Test raw_vs lives in [-K, 0] for the overridden K."""
    report = score_scene(lead_follow_scene, ScoringConfig(horizon=6))
    assert report.horizon == 6
    assert all(-6 <= r.raw_vs <= 0 for r in report.objects)


def test_score_pedestrians_by_distance(jaywalker_scene):
    """Test pedestrians get ps and no counterfactual scores by default."""
    report = score_scene(jaywalker_scene)
    near, far = report.record("ped_near"), report.record("ped_far")
    assert near.ps == -145.0
    assert far.ps == -936.0
    assert near.raw_rs is None
    assert not near.counterfactual


def test_score_pedestrians_counterfactually(jaywalker_scene):
    """Test the counterfactual switch scores pedestrians like vehicles."""
    config = ScoringConfig(pedestrian_method="counterfactual")
    near = score_scene(jaywalker_scene, config).record("ped_near")
    assert near.ps is None
    assert near.counterfactual
    assert near.raw_rs >= 0


def test_disabling_lane_change(adjacent_lane_scene):
    """Test the adjacent car only collides through a lane change."""
    with_lane_change = score_scene(adjacent_lane_scene).record("adjacent")
    assert with_lane_change.raw_vs > -20
    assert "lane_change" in with_lane_change.collision.agent_variant + (
        with_lane_change.collision.ego_variant
    )

    config = ScoringConfig(perturbation=PerturbationConfig().without(["lane_change"]))
    without = score_scene(adjacent_lane_scene, config).record("adjacent")
    assert without.raw_vs == -20


def test_scorer_uses_supplied_predictor(lead_follow_scene, straight_trajectory):
    """Test the ego predictor plans the base scene and every removal."""
    predictor = Mock()
    predictor.plan.return_value = straight_trajectory
    scorer = ImportanceScorer(ScoringConfig(), predictor)

    report = scorer.score_scene(lead_follow_scene)

    assert predictor.plan.call_count == 1 + len(lead_follow_scene.agents)
    assert all(record.raw_rs == 0.0 for record in report.objects)


def test_normalize_reports_single_scene(lead_follow_scene, manifest):
    """Test normalization within one scene."""
    batch = normalize_reports([score_scene(lead_follow_scene)], manifest)
    assert batch.normalization_scope == "scene"
    report = batch.scene("lead_follow-0")
    assert report.record("lead").importance == 1.0
    assert report.record("parked_0").importance == 0.0
    assert report.record("parked_0").norm_vs == 0.0


def test_normalize_reports_dataset(lead_follow_scene, jaywalker_scene, manifest):
    """Test normalization spans every scene of the batch."""
    reports = [score_scene(lead_follow_scene), score_scene(jaywalker_scene)]
    batch = normalize_reports(reports, manifest)
    assert batch.normalization_scope == "dataset"
    assert [s.scene_id for s in batch.scenes] == ["lead_follow-0", "jaywalker-0"]

    jay = batch.scene("jaywalker-0")
    assert jay.record("ped_near").norm_ps == 1.0
    assert jay.record("ped_far").norm_ps == 0.0
    assert jay.record("ped_near").ps == -145.0

    for scene in batch.scenes:
        for record in scene.objects:
            if record.counterfactual:
                assert 0.0 <= record.importance <= 1.0
                assert record.importance == max(record.norm_rs, record.norm_vs)


def test_removal_only_skips_velocity_scoring(lead_follow_scene):
    """Test no enabled perturbation leaves every object at -K without collision."""
    config = ScoringConfig(perturbation=PerturbationConfig(enabled=()))
    assert config.perturbation.removal_only
    report = score_scene(lead_follow_scene, config)
    assert all(record.raw_vs == -20 for record in report.objects)
    assert all(record.collision is None for record in report.objects)
    default = score_scene(lead_follow_scene).record("lead")
    assert report.record("lead").raw_rs == default.raw_rs


def test_removal_only_importance_is_norm_rs(lead_follow_scene, make_scene, vehicle):
    """Test a removal-only batch ranks by norm_rs even across horizons."""
    config = ScoringConfig(
        perturbation=PerturbationConfig(enabled=(), perturb_ego=False)
    )
    short = make_scene([vehicle("stopped", (12.0, 0.0))], scene_id="short", horizon=12)
    reports = [score_scene(lead_follow_scene, config), score_scene(short, config)]
    manifest = RunManifest(
        tool_version="test", input_paths=(), input_hash="", scoring=config
    )
    batch = normalize_reports(reports, manifest)

    records = [record for scene in batch.scenes for record in scene.objects]
    assert {record.raw_vs for record in records} == {-20, -12}
    for record in records:
        assert record.norm_vs == 0.0
        assert record.importance == record.norm_rs
