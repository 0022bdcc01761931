"""Counterfactual trajectories: hard stop, speed up, lane change, removal."""

import math
from typing import List, Optional, Tuple

import numpy as np

from .geometry import rotate
from .kinds import PREDICTED, PerturbationKind
from .models.scene import DEFAULT_LANE_WIDTH, Scene, Trajectory, scene_without_agent
from .predictors import EgoPredictor, RuleBasedPlanner
from .utils.config import PerturbationConfig, PredictorConfig

Variant = Tuple[str, Trajectory]

_LANE_CHANGE_ANGLE = math.pi / 4.0


def hard_stop(traj: Trajectory) -> Trajectory:
    """Collapse every waypoint onto the first one."""
    points = np.repeat(traj.points[:1], len(traj), axis=0)
    return Trajectory(points, traj.dt)


def speed_up(traj: Trajectory, factor: float) -> Trajectory:
    """Scale every consecutive displacement by ``factor``, keeping the origin.

    Raises:
        ValueError: if factor <= 1
    """
    if not factor > 1:
        raise ValueError(f"speed-up factor must be > 1, got {factor}")
    steps = np.diff(traj.points, axis=0) * factor
    points = np.vstack([traj.points[:1], traj.points[0] + np.cumsum(steps, axis=0)])
    return Trajectory(points, traj.dt)


def lane_change(traj: Trajectory, side: str, lane_width: float) -> Trajectory:
    """Shift into the adjacent lane at 45 degrees, then continue straight.

    Step lengths are those of the input. The initial heading is the direction
    of the first non-zero step; a stationary trajectory is returned unchanged.

    Args:
        traj: Trajectory to perturb
        side: "left" or "right" relative to the initial heading
        lane_width: Lateral offset at which the shift ends, meters
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got '{side}'")
    if not lane_width > 0:
        raise ValueError("lane_width must be > 0")

    steps = np.diff(traj.points, axis=0)
    lengths = np.linalg.norm(steps, axis=1)
    moving = np.flatnonzero(lengths > 0)
    if moving.size == 0:
        return traj

    heading = steps[moving[0]] / lengths[moving[0]]
    sign = 1.0 if side == "left" else -1.0
    diagonal = rotate(heading, sign * _LANE_CHANGE_ANGLE)
    lateral_gain = math.sin(_LANE_CHANGE_ANGLE)

    points = [traj.points[0]]
    lateral = 0.0
    for length in lengths:
        if lateral < lane_width:
            direction = diagonal
            lateral += length * lateral_gain
        else:
            direction = heading
        points.append(points[-1] + length * direction)
    return Trajectory(np.array(points), traj.dt)


def perturb(
    traj: Trajectory,
    kind: PerturbationKind,
    config: PerturbationConfig,
    lane_width: float,
) -> Trajectory:
    """Apply a single perturbation kind."""
    if kind == PerturbationKind.HARD_STOP:
        return hard_stop(traj)
    if kind == PerturbationKind.SPEED_UP:
        return speed_up(traj, config.speed_up_factor)
    if kind == PerturbationKind.LANE_CHANGE_LEFT:
        return lane_change(traj, "left", lane_width)
    return lane_change(traj, "right", lane_width)


def _lane_width(config: PerturbationConfig, scene_lane_width: Optional[float]) -> float:
    if config.lane_width is not None:
        return config.lane_width
    if scene_lane_width is not None:
        return scene_lane_width
    return DEFAULT_LANE_WIDTH


def agent_variants(
    traj: Trajectory,
    config: Optional[PerturbationConfig] = None,
    scene_lane_width: Optional[float] = None,
) -> List[Variant]:
    """The predicted trajectory followed by one entry per enabled perturbation."""
    config = config or PerturbationConfig()
    lane_width = _lane_width(config, scene_lane_width)
    variants: List[Variant] = [(PREDICTED, traj)]
    for kind in config.enabled:
        variants.append((kind.value, perturb(traj, kind, config, lane_width)))
    return variants


def ego_variants(
    ego_traj: Trajectory,
    config: Optional[PerturbationConfig] = None,
    scene_lane_width: Optional[float] = None,
) -> List[Variant]:
    """Ego variants: the full set when ego perturbation is on, else the prediction."""
    config = config or PerturbationConfig()
    if not config.perturb_ego:
        return [(PREDICTED, ego_traj)]
    return agent_variants(ego_traj, config, scene_lane_width)


def removal_ego_trajectory(
    scene: Scene,
    agent_id: str,
    config: Optional[PredictorConfig] = None,
    predictor: Optional[EgoPredictor] = None,
) -> Trajectory:
    """Ego trajectory re-planned in the scene without ``agent_id``."""
    counterfactual = scene_without_agent(scene, agent_id)
    planner = predictor if predictor is not None else RuleBasedPlanner(config)
    return planner.plan(counterfactual)
