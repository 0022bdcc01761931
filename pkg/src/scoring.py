"""Removal, velocity-perturbation and pedestrian importance scores."""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from .counterfactual import Variant, agent_variants, ego_variants
from .kinds import AgentKind
from .models.report import BatchReport, CollisionInfo, ObjectRecord, RunManifest
from .models.report import SceneReport
from .models.scene import AgentState, Scene, Trajectory, scene_without_agent
from .predictors import EgoPredictor, RuleBasedPlanner, build_predictor
from .predictors import predict_agents
from .utils.config import ScoringConfig
from .utils.errors import SceneValidationError, describe_validation_error

# Closest-approach distances this close are the same approach (rounding noise)
TIE_TOLERANCE = 1e-9


def _check_aligned(a: Trajectory, b: Trajectory) -> None:
    if len(a) != len(b):
        raise ValueError(f"trajectory length mismatch: {len(a)} vs {len(b)}")
    if a.dt != b.dt:
        raise ValueError(f"trajectory dt mismatch: {a.dt} vs {b.dt}")


def removal_score(base: Trajectory, counterfactual: Trajectory) -> float:
    """Sum over waypoints of the squared distance between two ego trajectories."""
    _check_aligned(base, counterfactual)
    diff = base.points - counterfactual.points
    return float(np.sum(diff * diff))


def closest_approach(ego: Trajectory, agent: Trajectory) -> Tuple[int, float]:
    """Index and distance of the closest same-index waypoint pair.

    Distances within ``TIE_TOLERANCE`` of the minimum count as ties, and ties
    go to the smaller index.
    """
    if len(ego) != len(agent):
        raise ValueError(f"trajectory length mismatch: {len(ego)} vs {len(agent)}")
    distances = np.linalg.norm(ego.points - agent.points, axis=1)
    ties = np.flatnonzero(distances <= distances.min() + TIE_TOLERANCE)
    index = int(ties[0])
    return index, float(distances[index])


def collision_index(ego: Trajectory, agent: Trajectory, tau: float) -> Optional[int]:
    """Index of closest approach if it is within ``tau``, otherwise None."""
    index, distance = closest_approach(ego, agent)
    return index if distance < tau else None


def velocity_score(
    ego_variants: Sequence[Variant],
    agent_variants: Sequence[Variant],
    config: Optional[ScoringConfig] = None,
) -> Tuple[int, Optional[CollisionInfo]]:
    """Score the soonest collision over every (ego, agent) variant pair.

    Returns:
        (raw_vs, collision): raw_vs is -k* for the soonest collision index k*
        (0 without index weighting) or -K when nothing collides
    """
    config = config or ScoringConfig()
    if not ego_variants or not agent_variants:
        raise ValueError("variant lists must not be empty")

    horizon = len(ego_variants[0][1])
    soonest: Optional[CollisionInfo] = None
    for ego_kind, ego_traj in ego_variants:
        for agent_kind, agent_traj in agent_variants:
            index, distance = closest_approach(ego_traj, agent_traj)
            if distance >= config.tau:
                continue
            if soonest is None or index < soonest.index:
                soonest = CollisionInfo(
                    ego_variant=ego_kind,
                    agent_variant=agent_kind,
                    index=index,
                    distance=distance,
                )

    if soonest is None:
        return -horizon, None
    if not config.index_weighting:
        return 0, soonest
    return -soonest.index, soonest


def normalize(values: Sequence[float]) -> List[float]:
    """Min-max normalize to [0, 1]; a constant (or singleton) batch maps to 0."""
    if len(values) == 0:
        return []
    array = np.asarray(values, dtype=np.float64)
    low, high = float(array.min()), float(array.max())
    if high == low:
        return [0.0] * len(values)
    return [float(v) for v in (array - low) / (high - low)]


def combine(norm_rs: float, norm_vs: float) -> float:
    """Importance of a vehicle: the larger of its two normalized scores."""
    for name, value in (("norm_rs", norm_rs), ("norm_vs", norm_vs)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    return max(norm_rs, norm_vs)


def ego_distance(agent: AgentState, ego: AgentState) -> float:
    """Euclidean distance between an object and the ego vehicle."""
    dx = agent.position.x - ego.position.x
    return math.hypot(dx, agent.position.y - ego.position.y)


def pedestrian_score(ped: AgentState, ego: AgentState) -> float:
    """Negative squared distance of a pedestrian from the ego vehicle."""
    if ped.kind != AgentKind.PEDESTRIAN:
        raise ValueError(f"Agent '{ped.id}' is a {ped.kind.value}, not a pedestrian")
    dx = ped.position.x - ego.position.x
    dy = ped.position.y - ego.position.y
    return -(dx * dx + dy * dy)


def everything_score(distance: float) -> float:
    """Per-object score of the everything-is-important baseline."""
    return 1.0


def inverse_distance_score(distance: float) -> float:
    """Per-object score of the inverse-distance baseline."""
    return -distance


def baseline_everything(scene: Scene) -> Dict[str, float]:
    """Every object is equally important."""
    return {
        agent.id: everything_score(ego_distance(agent, scene.ego))
        for agent in scene.agents
    }


def baseline_inverse_distance(scene: Scene) -> Dict[str, float]:
    """Negative distance to the ego vehicle."""
    return {
        agent.id: inverse_distance_score(ego_distance(agent, scene.ego))
        for agent in scene.agents
    }


# Baselines by evaluation method name, applied to an object's ego distance
BASELINES: Dict[str, Callable[[float], float]] = {
    "everything": everything_score,
    "inverse_distance": inverse_distance_score,
}


def apply_overrides(scene: Scene, config: ScoringConfig) -> Scene:
    """Replace the scene horizon / time step with configured overrides.

    The overridden scene is validated again, so a time step that no longer
    matches the history spacing is rejected.

    Raises:
        SceneValidationError: if the overridden scene breaks an invariant
    """
    update = {}
    if config.horizon is not None:
        update["horizon"] = config.horizon
    if config.dt is not None:
        update["dt"] = config.dt
    if not update:
        return scene
    try:
        return Scene.model_validate({**scene.model_dump(), **update})
    except ValidationError as e:
        raise SceneValidationError(
            f"{scene.scene_id}: {describe_validation_error(e)}"
        ) from e


class ImportanceScorer:
    """Scores every object of a scene by counterfactual reasoning."""

    def __init__(
        self,
        config: Optional[ScoringConfig] = None,
        predictor: Optional[EgoPredictor] = None,
    ):
        """Initialize the scorer.

        Args:
            config: Scoring configuration
            predictor: Ego predictor; built from the config when omitted
        """
        self.config = config or ScoringConfig()
        self.predictor = predictor or build_predictor(self.config)
        self.logger = logging.getLogger(__name__)

    def _plan(self, scene: Scene, predictions: Dict[str, Trajectory]) -> Trajectory:
        if isinstance(self.predictor, RuleBasedPlanner):
            return self.predictor.plan(scene, agent_predictions=predictions)
        return self.predictor.plan(scene)

    def score_scene(self, scene: Scene) -> SceneReport:
        """Compute raw scores for every object in a scene.

        Args:
            scene: Scene to score

        Returns:
            SceneReport with raw_rs/raw_vs (vehicles) or ps (pedestrians);
            normalized fields are filled later at batch level
        """
        cfg = self.config
        scene = apply_overrides(scene, cfg)
        predictions = predict_agents(scene)
        ego_traj = self._plan(scene, predictions)
        ego_set = ego_variants(ego_traj, cfg.perturbation, scene.lane_width)

        records: List[ObjectRecord] = []
        for agent in scene.agents:
            distance = ego_distance(agent, scene.ego)
            if (
                agent.kind == AgentKind.PEDESTRIAN
                and cfg.pedestrian_method == "distance"
            ):
                records.append(
                    ObjectRecord(
                        id=agent.id,
                        kind=agent.kind,
                        distance=distance,
                        ps=pedestrian_score(agent, scene.ego),
                    )
                )
                continue

            removed = self._plan(scene_without_agent(scene, agent.id), predictions)
            raw_rs = removal_score(ego_traj, removed)
            if cfg.perturbation.removal_only:
                # no counterfactual motion to test: every object scores -K
                raw_vs, collision = -scene.horizon, None
            else:
                agent_set = agent_variants(
                    predictions[agent.id], cfg.perturbation, scene.lane_width
                )
                raw_vs, collision = velocity_score(ego_set, agent_set, cfg)
            self.logger.debug(
                f"{scene.scene_id}/{agent.id}: raw_rs={raw_rs:.4f} raw_vs={raw_vs}"
            )
            records.append(
                ObjectRecord(
                    id=agent.id,
                    kind=agent.kind,
                    distance=distance,
                    raw_rs=raw_rs,
                    raw_vs=raw_vs,
                    collision=collision,
                )
            )

        return SceneReport(
            scene_id=scene.scene_id,
            ego_id=scene.ego.id,
            horizon=scene.horizon,
            objects=tuple(records),
        )


def score_scene(
    scene: Scene,
    config: Optional[ScoringConfig] = None,
    predictor: Optional[EgoPredictor] = None,
) -> SceneReport:
    """Raw importance scores of one scene (see ``ImportanceScorer``)."""
    return ImportanceScorer(config, predictor).score_scene(scene)


def normalize_reports(
    reports: Sequence[SceneReport], manifest: RunManifest
) -> BatchReport:
    """Min-max normalize raw scores across the whole batch.

    raw_rs, raw_vs and ps are normalized over every object of the batch that
    carries them; vehicle importance is the max of the normalized pair. A
    removal-only run (see ``PerturbationConfig.removal_only``) pins norm_vs to
    0, so importance is norm_rs even when scene horizons differ.
    """
    keyed = [(report.scene_id, r) for report in reports for r in report.objects]
    counterfactual = [(sid, r) for sid, r in keyed if r.counterfactual]
    pedestrians = [(sid, r) for sid, r in keyed if r.ps is not None]

    norm_rs = normalize([r.raw_rs for _, r in counterfactual])
    if manifest.scoring is not None and manifest.scoring.perturbation.removal_only:
        norm_vs = [0.0] * len(counterfactual)
    else:
        norm_vs = normalize([r.raw_vs for _, r in counterfactual])
    norm_ps = normalize([r.ps for _, r in pedestrians])

    updates: Dict[Tuple[str, str], Dict[str, float]] = {}
    for (scene_id, record), rs, vs in zip(counterfactual, norm_rs, norm_vs):
        updates[(scene_id, record.id)] = {
            "norm_rs": rs,
            "norm_vs": vs,
            "importance": combine(rs, vs),
        }
    for (scene_id, record), ps in zip(pedestrians, norm_ps):
        updates[(scene_id, record.id)] = {"norm_ps": ps}

    scenes = tuple(
        report.model_copy(
            update={
                "objects": tuple(
                    record.model_copy(
                        update=updates.get((report.scene_id, record.id), {})
                    )
                    for record in report.objects
                )
            }
        )
        for report in reports
    )
    return BatchReport(
        manifest=manifest,
        normalization_scope="scene" if len(reports) == 1 else "dataset",
        scenes=scenes,
    )
