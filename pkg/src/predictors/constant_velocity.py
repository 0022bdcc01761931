"""Constant-velocity prediction for non-ego agents."""

import numpy as np

from ..models.scene import MIN_HISTORY, AgentState, Trajectory
from ..utils.errors import InsufficientHistoryError

# Number of most recent displacements averaged into the velocity estimate
AVERAGING_WINDOW = 5


def estimate_velocity(agent: AgentState) -> np.ndarray:
    """Mean of the most recent per-step displacements divided by the step.

    Displacements run over the history samples followed by the current
    position, so five history samples give five displacements.
    """
    if len(agent.history) < MIN_HISTORY:
        raise InsufficientHistoryError(
            f"Agent '{agent.id}' has {len(agent.history)} history samples; "
            f"at least {MIN_HISTORY} are required"
        )
    track = agent.track()[-(AVERAGING_WINDOW + 1) :]
    displacements = np.diff(track, axis=0)
    return displacements.mean(axis=0) / agent.history_step()


def constant_velocity_predict(agent: AgentState, horizon: int, dt: float) -> Trajectory:
    """Project an agent forward at its averaged velocity.

    Args:
        agent: Agent with at least five history samples
        horizon: Number of waypoints K
        dt: Waypoint time step in seconds

    Returns:
        Trajectory whose waypoint k (1-based) is position + k * dt * v
    """
    velocity = estimate_velocity(agent)
    steps = np.arange(1, horizon + 1, dtype=np.float64)[:, None]
    points = agent.position.as_array() + steps * dt * velocity
    return Trajectory(points, dt)
