"""Annotation counts and evaluation results."""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..kinds import AgentKind

MIN_ANNOTATORS = 5


class AnnotationRecord(BaseModel):
    """How many annotators marked one object important."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scene_id: str
    object_id: str
    annotator_count: int
    total_annotators: int

    @field_validator("annotator_count")
    @classmethod
    def validate_count(cls, v: int) -> int:
        """Validate the count is non-negative."""
        if v < 0:
            raise ValueError("annotator_count must be >= 0")
        return v

    @field_validator("total_annotators")
    @classmethod
    def validate_total(cls, v: int) -> int:
        """Every clip is labelled by at least five annotators."""
        if v < MIN_ANNOTATORS:
            raise ValueError(f"total_annotators must be >= {MIN_ANNOTATORS}")
        return v

    @model_validator(mode="after")
    def validate_bounds(self) -> "AnnotationRecord":
        """The count cannot exceed the number of annotators."""
        if self.annotator_count > self.total_annotators:
            raise ValueError(
                f"annotator_count {self.annotator_count} exceeds total_annotators "
                f"{self.total_annotators} for {self.scene_id}/{self.object_id}"
            )
        return self

    @property
    def key(self) -> Tuple[str, str]:
        return (self.scene_id, self.object_id)


class AnnotationSet(BaseModel):
    """Annotation counts keyed by (scene id, object id)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    records: Tuple[AnnotationRecord, ...] = ()

    @model_validator(mode="after")
    def validate_unique(self) -> "AnnotationSet":
        """Each (scene id, object id) appears once."""
        seen = set()
        for record in self.records:
            if record.key in seen:
                raise ValueError(
                    f"records: duplicate annotation for {record.scene_id}/"
                    f"{record.object_id}"
                )
            seen.add(record.key)
        return self


class PRPoint(BaseModel):
    """Metrics when predicting positive for every score >= threshold."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    threshold: float
    precision: float
    recall: float
    f1: float
    accuracy: float


class EvalResult(BaseModel):
    """Pooled AP, OT-F1 and OT-Accuracy with the full threshold trace."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    ap: float
    ot_f1: float
    ot_accuracy: float
    ot_f1_threshold: float
    ot_accuracy_threshold: float
    n_positive: int
    n_negative: int
    n_ignored: int = 0
    category_filter: Optional[AgentKind] = None
    method: str = "ours"
    pr_trace: Tuple[PRPoint, ...] = Field(default=())
