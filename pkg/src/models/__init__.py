"""Domain models for scenes, reports and annotations."""

from .annotations import AnnotationRecord, AnnotationSet, EvalResult, PRPoint
from ..kinds import PREDICTED, AgentKind, GroundTruthLabel, PerturbationKind
from .report import (
    BatchReport,
    CollisionInfo,
    EvalReport,
    ObjectRecord,
    RunManifest,
    SceneReport,
)
from .scene import (
    AgentState,
    HistorySample,
    Scene,
    Trajectory,
    Vec2,
    scene_without_agent,
    transform_scene,
)

__all__ = [
    "PREDICTED",
    "AgentKind",
    "AgentState",
    "AnnotationRecord",
    "AnnotationSet",
    "BatchReport",
    "CollisionInfo",
    "EvalReport",
    "EvalResult",
    "GroundTruthLabel",
    "HistorySample",
    "ObjectRecord",
    "PRPoint",
    "PerturbationKind",
    "RunManifest",
    "Scene",
    "SceneReport",
    "Trajectory",
    "Vec2",
    "scene_without_agent",
    "transform_scene",
]
