"""Rule-based corridor-following planner for the ego vehicle."""

import logging
from typing import Dict, List, Optional

import numpy as np

from ..geometry import Route
from ..models.scene import Scene, Trajectory
from ..utils.config import PredictorConfig
from .constant_velocity import constant_velocity_predict

# Slack on the corridor bounds; rotating a scene moves projections by ~1e-14
BOUNDARY_EPS = 1e-9


class RuleBasedPlanner:
    """Deterministic longitudinal planner along the ego route.

    Each step the ego advances by its current speed, then either brakes at
    ``max_decel`` (some agent is inside the corridor within braking distance
    plus ``lookahead_gap`` ahead) or relaxes toward ``desired_speed`` at
    ``max_accel``. Corridor bounds are compared with ``BOUNDARY_EPS`` slack,
    so an agent level with the ego (zero station gap) never blocks it.
    """

    def __init__(self, config: Optional[PredictorConfig] = None):
        """Initialize the planner.

        Args:
            config: Planner parameters (defaults when omitted)
        """
        self.config = config or PredictorConfig()
        self.logger = logging.getLogger(__name__)

    def corridor_halfwidth(self, scene: Scene) -> float:
        """Half width of the corridor the planner watches."""
        if self.config.corridor_halfwidth is not None:
            return self.config.corridor_halfwidth
        return scene.lane_width / 2.0

    def plan(
        self,
        scene: Scene,
        agent_predictions: Optional[Dict[str, Trajectory]] = None,
    ) -> Trajectory:
        """Plan the ego trajectory for a scene.

        Args:
            scene: Scene to plan in
            agent_predictions: Precomputed constant-velocity predictions keyed
                by agent id; missing agents are predicted on the fly

        Returns:
            K waypoints along the route
        """
        cfg = self.config
        route = Route(scene.route)
        horizon, dt = scene.horizon, scene.dt
        halfwidth = self.corridor_halfwidth(scene)

        # Station/lateral of every agent at times 0, dt, ..., (K - 1) dt
        tracks = []
        for agent in scene.agents:
            predicted = None
            if agent_predictions is not None:
                predicted = agent_predictions.get(agent.id)
            if predicted is None:
                predicted = constant_velocity_predict(agent, horizon, dt)
            positions = np.vstack([agent.position.as_array(), predicted.points[:-1]])
            tracks.append([route.project(p) for p in positions])

        s, _ = route.project(scene.ego.position.as_array())
        v = min(scene.ego.speed, cfg.desired_speed)
        points: List[np.ndarray] = []

        for k in range(horizon):
            reach = v * v / (2.0 * cfg.max_decel) + cfg.lookahead_gap
            blocked = any(
                abs(track[k][1]) <= halfwidth + BOUNDARY_EPS
                and BOUNDARY_EPS < track[k][0] - s <= reach + BOUNDARY_EPS
                for track in tracks
            )

            s = s + v * dt
            points.append(route.point_at(s))

            if blocked:
                v = max(0.0, v - cfg.max_decel * dt)
            elif v < cfg.desired_speed:
                v = min(cfg.desired_speed, v + cfg.max_accel * dt)

        self.logger.debug(
            f"Planned ego trajectory for scene {scene.scene_id}: "
            f"final station {s:.3f} m, final speed {v:.3f} m/s"
        )
        return Trajectory(np.array(points), dt)


def ego_plan(scene: Scene, config: Optional[PredictorConfig] = None) -> Trajectory:
    """Plan the ego trajectory with the rule-based planner."""
    return RuleBasedPlanner(config).plan(scene)
