"""Importance report types and the run manifest."""

from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.config import EvalConfig, ScoringConfig
from ..kinds import AgentKind
from .annotations import EvalResult


class CollisionInfo(BaseModel):
    """The soonest predicted collision behind a velocity score."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    ego_variant: str
    agent_variant: str
    index: int
    distance: float


class ObjectRecord(BaseModel):
    """Scores of one non-ego object.

    Raw removal/velocity scores are filled for objects scored
    counterfactually, ``ps`` for pedestrians scored by distance. The
    normalized fields stay empty until the batch is normalized.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    id: str
    kind: AgentKind
    distance: float
    raw_rs: Optional[float] = None
    raw_vs: Optional[int] = None
    norm_rs: Optional[float] = None
    norm_vs: Optional[float] = None
    importance: Optional[float] = Field(default=None, alias="is")
    ps: Optional[float] = None
    norm_ps: Optional[float] = None
    collision: Optional[CollisionInfo] = None

    @property
    def counterfactual(self) -> bool:
        """Whether this object carries removal/velocity scores."""
        return self.raw_rs is not None


class SceneReport(BaseModel):
    """Per-scene importance records, in scene agent order."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scene_id: str
    ego_id: str
    horizon: int
    objects: Tuple[ObjectRecord, ...] = ()

    @model_validator(mode="after")
    def validate_collisions(self) -> "SceneReport":
        """A collision is recorded exactly when raw_vs beats -K."""
        for record in self.objects:
            if record.raw_vs is None:
                continue
            if not -self.horizon <= record.raw_vs <= 0:
                raise ValueError(
                    f"objects[{record.id}].raw_vs must be in [-{self.horizon}, 0]"
                )
            collided = record.raw_vs > -self.horizon
            if collided != (record.collision is not None):
                raise ValueError(
                    f"objects[{record.id}]: collision must be present iff "
                    f"raw_vs > -{self.horizon}"
                )
        return self

    def record(self, object_id: str) -> ObjectRecord:
        """Look up an object record by id."""
        for record in self.objects:
            if record.id == object_id:
                return record
        raise KeyError(object_id)


class RunManifest(BaseModel):
    """Provenance embedded in every output document."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tool_version: str
    input_paths: Tuple[str, ...]
    input_hash: str
    scoring: Optional[ScoringConfig] = None
    evaluation: Optional[EvalConfig] = None


class BatchReport(BaseModel):
    """Scores for a batch of scenes, normalized across the batch."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    manifest: RunManifest
    normalization_scope: Literal["scene", "dataset"] = "dataset"
    scenes: Tuple[SceneReport, ...] = ()

    def scene(self, scene_id: str) -> SceneReport:
        """Look up a scene report by id."""
        for report in self.scenes:
            if report.scene_id == scene_id:
                return report
        raise KeyError(scene_id)


class EvalReport(BaseModel):
    """Evaluation output: the metrics plus provenance."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    manifest: RunManifest
    report_manifest: RunManifest
    result: EvalResult
