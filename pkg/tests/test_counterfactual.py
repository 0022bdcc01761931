"""Tests for trajectory perturbations and counterfactual removal."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from src.counterfactual import (
    agent_variants,
    ego_variants,
    hard_stop,
    lane_change,
    perturb,
    removal_ego_trajectory,
    speed_up,
)
from src.kinds import PREDICTED, PerturbationKind
from src.models.scene import Trajectory
from src.predictors import ego_plan
from src.utils.config import PerturbationConfig

ALL_LABELS = [
    "predicted",
    "hard_stop",
    "speed_up",
    "lane_change_left",
    "lane_change_right",
]


def _line(heading, step, n, origin=(0.0, 0.0), dt=0.25):
    direction = np.array([math.cos(heading), math.sin(heading)])
    points = np.array(origin) + step * np.arange(n)[:, None] * direction
    return Trajectory(points, dt)


def _angle(a, b):
    """Unsigned angle between two vectors."""
    cross = a[0] * b[1] - a[1] * b[0]
    return abs(math.atan2(cross, float(np.dot(a, b))))


def test_hard_stop_collapses_to_first_waypoint():
    """Test hard stop repeats the first waypoint K times."""
    traj = hard_stop(_line(0.0, 1.0, 20))
    assert len(traj) == 20
    assert traj.dt == 0.25
    assert np.all(traj.points == [0.0, 0.0])


def test_hard_stop_fixed_point():
    """Test a stationary trajectory and a second hard stop are unchanged."""
    stopped = hard_stop(_line(0.3, 2.0, 10, origin=(5.0, 5.0)))
    assert hard_stop(stopped) == stopped


def test_speed_up_straight():
    """Test 1 m steps become 1.5 m steps from the same origin."""
    traj = speed_up(_line(0.0, 1.0, 20), 1.5)
    assert np.allclose(traj.points[:, 0], 1.5 * np.arange(20))
    assert np.allclose(traj.step_lengths(), 1.5)


def test_speed_up_stationary_and_factor_check():
    """Test a stationary trajectory is unchanged and factor <= 1 is rejected."""
    stopped = hard_stop(_line(0.0, 1.0, 5))
    assert speed_up(stopped, 3.0) == stopped
    with pytest.raises(ValueError, match="factor must be > 1"):
        speed_up(stopped, 1.0)


def test_speed_up_preserves_corner():
    """Test an L-shaped path keeps its corner angle."""
    points = [[0, 0], [1, 0], [2, 0], [2, 1], [2, 2]]
    traj = speed_up(Trajectory(points, 0.25), 2.0)
    assert np.allclose(traj.points, [[0, 0], [2, 0], [4, 0], [4, 2], [4, 4]])


def test_lane_change_left_example():
    """Test five diagonal steps then straight at y = 5 * sqrt(2) / 2."""
    traj = lane_change(_line(0.0, 1.0, 20), "left", 3.5)
    half = math.sqrt(2.0) / 2.0
    assert np.allclose(traj.points[5], [5 * half, 5 * half])
    assert np.allclose(traj.points[6:, 1], 5 * half)
    assert np.allclose(np.diff(traj.points[5:, 0]), 1.0)


def test_lane_change_right_mirrors_left():
    """Test the right shift negates the left one's y offsets."""
    base = _line(0.0, 1.0, 20)
    left = lane_change(base, "left", 3.5)
    right = lane_change(base, "right", 3.5)
    assert np.allclose(left.points[:, 0], right.points[:, 0])
    assert np.allclose(left.points[:, 1], -right.points[:, 1])


def test_lane_change_stationary_and_arguments():
    """Test a stationary trajectory is unchanged and bad arguments rejected."""
    stopped = hard_stop(_line(0.0, 1.0, 5))
    assert lane_change(stopped, "left", 3.5) == stopped
    with pytest.raises(ValueError, match="side must be"):
        lane_change(stopped, "up", 3.5)
    with pytest.raises(ValueError, match="lane_width must be > 0"):
        lane_change(stopped, "left", 0.0)


def test_lane_change_heading_from_first_moving_step():
    """Test leading repeated waypoints do not define the heading."""
    points = [[0.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 2.0]]
    traj = lane_change(Trajectory(points, 0.25), "left", 3.5)
    # initial heading +y, left is -x
    assert traj.points[2, 0] < 0.0
    assert traj.points[2, 1] > 0.0


@pytest.mark.property
@settings(max_examples=200, deadline=None)
@given(
    heading=st.floats(-math.pi, math.pi, exclude_max=True),
    step=st.floats(0.1, 5.0),
    n=st.integers(2, 40),
    factor=st.floats(1.01, 4.0),
)
def test_speed_up_scales_every_step(heading, step, n, factor):
    """Test every consecutive distance scales by the factor."""
    base = _line(heading, step, n, origin=(3.0, -7.0))
    fast = speed_up(base, factor)
    assert np.allclose(fast.points[0], base.points[0])
    assert np.allclose(fast.step_lengths(), factor * base.step_lengths(), atol=1e-9)


@pytest.mark.property
@settings(
    max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much]
)
@given(
    heading=st.floats(-math.pi, math.pi, exclude_max=True),
    step=st.floats(0.1, 5.0),
    n=st.integers(2, 60),
    lane_width=st.floats(1.0, 5.0),
    side=st.sampled_from(["left", "right"]),
)
def test_lane_change_geometry(heading, step, n, lane_width, side):
    """Test 45-degree shift, lateral reach and a parallel second phase."""
    half = math.sqrt(2.0) / 2.0
    assume((n - 1) * step * half >= lane_width + 1e-6)

    base = _line(heading, step, n)
    shifted = lane_change(base, side, lane_width)
    direction = np.array([math.cos(heading), math.sin(heading)])
    normal = np.array([-direction[1], direction[0]])
    sign = 1.0 if side == "left" else -1.0

    assert len(shifted) == n
    assert np.allclose(shifted.step_lengths(), base.step_lengths(), atol=1e-9)

    offsets = sign * (shifted.points - shifted.points[0]) @ normal
    final = offsets[-1]
    assert lane_width - 1e-9 <= final <= lane_width + step + 1e-9

    steps = np.diff(shifted.points, axis=0)
    for i, segment in enumerate(steps):
        if offsets[i] < lane_width - 1e-9:
            assert _angle(direction, segment) == pytest.approx(math.pi / 4, abs=1e-9)
        elif offsets[i] > lane_width + 1e-9:
            assert _angle(direction, segment) < 1e-9


def test_perturb_dispatch(straight_trajectory):
    """Test each kind maps to its perturbation."""
    config = PerturbationConfig()
    assert perturb(straight_trajectory, PerturbationKind.HARD_STOP, config, 3.5) == (
        hard_stop(straight_trajectory)
    )
    assert perturb(straight_trajectory, PerturbationKind.SPEED_UP, config, 3.5) == (
        speed_up(straight_trajectory, 1.5)
    )
    right = perturb(straight_trajectory, PerturbationKind.LANE_CHANGE_RIGHT, config, 3)
    assert right == lane_change(straight_trajectory, "right", 3)


def test_agent_variants_all_enabled(straight_trajectory):
    """Test the predicted trajectory comes first, then each perturbation."""
    variants = agent_variants(straight_trajectory)
    assert [label for label, _ in variants] == ALL_LABELS
    assert variants[0] == (PREDICTED, straight_trajectory)
    assert all(len(traj) == 20 for _, traj in variants)


def test_agent_variants_subset(straight_trajectory):
    """Test disabled perturbations are skipped."""
    config = PerturbationConfig(enabled=["hard_stop"])
    assert [label for label, _ in agent_variants(straight_trajectory, config)] == [
        "predicted",
        "hard_stop",
    ]


def test_agent_variants_lane_width_precedence(straight_trajectory):
    """Test configured lane width beats the scene's, which beats the default."""
    configured = PerturbationConfig(lane_width=2.0)
    variants = dict(agent_variants(straight_trajectory, configured, 5.0))
    assert variants["lane_change_left"] == lane_change(straight_trajectory, "left", 2.0)

    variants = dict(agent_variants(straight_trajectory, None, 5.0))
    assert variants["lane_change_left"] == lane_change(straight_trajectory, "left", 5.0)

    variants = dict(agent_variants(straight_trajectory))
    assert variants["lane_change_left"] == lane_change(straight_trajectory, "left", 3.5)


def test_ego_variants(straight_trajectory):
    """Test ego perturbation toggling."""
    assert len(ego_variants(straight_trajectory)) == 5
    off = PerturbationConfig(perturb_ego=False)
    assert ego_variants(straight_trajectory, off) == [(PREDICTED, straight_trajectory)]


def test_removal_of_lead_lengthens_plan(lead_follow_scene):
    """Test removing the stopped lead lets the ego travel strictly further."""
    base = ego_plan(lead_follow_scene)
    removed = removal_ego_trajectory(lead_follow_scene, "lead")
    assert removed.arc_length() > base.arc_length()


def test_removal_of_off_route_agent_is_identity(lead_follow_scene):
    """Test removing a parked car beside the road changes nothing."""
    base = ego_plan(lead_follow_scene)
    assert removal_ego_trajectory(lead_follow_scene, "parked_0") == base


def test_removal_of_one_of_two_leads(make_scene, vehicle):
    """Test the other lead at the same station still blocks."""
    scene = make_scene([vehicle("a", (10.0, 0.5)), vehicle("b", (10.0, -0.5))])
    assert removal_ego_trajectory(scene, "a") == ego_plan(scene)


def test_removal_with_custom_predictor(lead_follow_scene, straight_trajectory):
    """Test a supplied predictor plans the counterfactual scene."""
    seen = []

    class RecordingPredictor:
        def plan(self, scene):
            seen.append(scene.agent_ids())
            return straight_trajectory

    result = removal_ego_trajectory(
        lead_follow_scene, "lead", predictor=RecordingPredictor()
    )
    assert result is straight_trajectory
    assert seen == [["parked_0", "parked_1"]]
