"""Trajectory predictors for the ego vehicle and surrounding agents."""

from typing import Dict, NamedTuple, Optional, Protocol

from ..models.scene import Scene, Trajectory
from ..utils.config import PredictorConfig, ScoringConfig
from .constant_velocity import constant_velocity_predict, estimate_velocity
from .external import ExternalPredictor
from .planner import RuleBasedPlanner, ego_plan


class EgoPredictor(Protocol):
    """Anything that can predict the ego trajectory of a scene."""

    def plan(self, scene: Scene) -> Trajectory: ...


class PredictionSet(NamedTuple):
    """Ego trajectory plus one constant-velocity trajectory per agent."""

    ego: Trajectory
    agents: Dict[str, Trajectory]


def predict_agents(scene: Scene) -> Dict[str, Trajectory]:
    """Constant-velocity predictions for every non-ego agent, in scene order."""
    return {
        agent.id: constant_velocity_predict(agent, scene.horizon, scene.dt)
        for agent in scene.agents
    }


def predict_all(
    scene: Scene,
    config: Optional[PredictorConfig] = None,
    predictor: Optional[EgoPredictor] = None,
) -> PredictionSet:
    """Predict the ego (planner) and every agent (constant velocity).

    Args:
        scene: Scene to predict
        config: Rule-based planner parameters, used when no predictor is given
        predictor: Ego predictor overriding the rule-based planner

    Returns:
        PredictionSet with K-waypoint trajectories
    """
    agents = predict_agents(scene)
    if predictor is None:
        ego = RuleBasedPlanner(config).plan(scene, agent_predictions=agents)
    else:
        ego = predictor.plan(scene)
    return PredictionSet(ego=ego, agents=agents)


def build_predictor(config: ScoringConfig) -> EgoPredictor:
    """Instantiate the ego predictor selected in the scoring config."""
    if config.predictor_backend == "external":
        return ExternalPredictor(
            config.predictor_command, timeout=config.predictor_timeout
        )
    return RuleBasedPlanner(config.predictor)


__all__ = [
    "EgoPredictor",
    "ExternalPredictor",
    "PredictionSet",
    "RuleBasedPlanner",
    "build_predictor",
    "constant_velocity_predict",
    "ego_plan",
    "estimate_velocity",
    "predict_agents",
    "predict_all",
]
