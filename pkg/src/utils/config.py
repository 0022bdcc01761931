"""Configuration management for the importance engine."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Literal, Optional, Tuple

import yaml
from dotenv import load_dotenv
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from ..kinds import PERTURBATION_GROUPS, AgentKind, PerturbationKind
from .errors import describe_validation_error

ScoreMethod = Literal["ours", "removal", "velocity", "everything", "inverse_distance"]


class PredictorConfig(BaseModel):
    """Parameters of the rule-based ego planner."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    desired_speed: float = Field(default=8.0)
    max_accel: float = Field(default=2.0)
    max_decel: float = Field(default=4.0)
    # None derives lane_width / 2 from the scene
    corridor_halfwidth: Optional[float] = Field(default=None)
    lookahead_gap: float = Field(default=6.0)

    @field_validator(
        "desired_speed", "max_accel", "max_decel", "corridor_halfwidth", "lookahead_gap"
    )
    @classmethod
    def validate_positive(cls, v: Optional[float], info) -> Optional[float]:
        """Validate planner parameters are strictly positive."""
        if v is not None and not v > 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return v


class PerturbationConfig(BaseModel):
    """Which counterfactual perturbations run, and how strong they are."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    speed_up_factor: float = Field(default=1.5)
    # None uses the scene's lane width (3.5 m unless the scene says otherwise)
    lane_width: Optional[float] = Field(default=None)
    enabled: Tuple[PerturbationKind, ...] = Field(
        default=tuple(PerturbationKind)
    )
    perturb_ego: bool = Field(default=True)

    @property
    def removal_only(self) -> bool:
        """True when nothing is perturbed, the ego included.

        With no perturbation kind enabled the ego has nothing to be perturbed
        by either, so ``perturb_ego`` does not matter.
        """
        return not self.enabled

    @field_validator("speed_up_factor")
    @classmethod
    def validate_factor(cls, v: float) -> float:
        """Validate the speed-up factor actually speeds things up."""
        if not v > 1:
            raise ValueError("speed_up_factor must be > 1")
        return v

    @field_validator("lane_width")
    @classmethod
    def validate_lane_width(cls, v: Optional[float]) -> Optional[float]:
        """Validate lane width is positive when given."""
        if v is not None and not v > 0:
            raise ValueError("lane_width must be > 0")
        return v

    @field_validator("enabled", mode="before")
    @classmethod
    def expand_groups(cls, v: Any) -> Any:
        """Accept group names such as "lane_change" and keep canonical order."""
        if isinstance(v, str):
            v = [v]
        kinds = set()
        for item in v:
            if isinstance(item, PerturbationKind):
                kinds.add(item)
            elif item in PERTURBATION_GROUPS:
                kinds.update(PERTURBATION_GROUPS[item])
            else:
                raise ValueError(f"Unknown perturbation: {item}")
        return tuple(kind for kind in PerturbationKind if kind in kinds)

    def without(self, names: Iterable[str]) -> "PerturbationConfig":
        """Return a copy with the named perturbations (or groups) disabled."""
        disabled = set()
        for name in names:
            if name not in PERTURBATION_GROUPS:
                raise ValueError(
                    f"Unknown perturbation '{name}'; expected one of "
                    f"{', '.join(sorted(PERTURBATION_GROUPS))}"
                )
            disabled.update(PERTURBATION_GROUPS[name])
        remaining = tuple(kind for kind in self.enabled if kind not in disabled)
        return self.model_copy(update={"enabled": remaining})


class ScoringConfig(BaseModel):
    """Everything that influences the raw importance scores."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    tau: float = Field(default=2.0)
    index_weighting: bool = Field(default=True)
    # None keeps the per-scene horizon / time step
    horizon: Optional[int] = Field(default=None)
    dt: Optional[float] = Field(default=None)
    pedestrian_method: Literal["distance", "counterfactual"] = Field(
        default="distance"
    )
    perturbation: PerturbationConfig = Field(default_factory=PerturbationConfig)
    predictor: PredictorConfig = Field(default_factory=PredictorConfig)
    predictor_backend: Literal["rule", "external"] = Field(default="rule")
    predictor_command: Optional[str] = Field(default=None)
    predictor_timeout: float = Field(default=10.0)

    @field_validator("tau", "predictor_timeout")
    @classmethod
    def validate_positive(cls, v: float, info) -> float:
        """Validate strictly positive scalars."""
        if not v > 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return v

    @field_validator("horizon")
    @classmethod
    def validate_horizon(cls, v: Optional[int]) -> Optional[int]:
        """Validate the horizon override."""
        if v is not None and v < 1:
            raise ValueError("horizon must be a positive integer")
        return v

    @field_validator("dt")
    @classmethod
    def validate_dt(cls, v: Optional[float]) -> Optional[float]:
        """Validate the time step override."""
        if v is not None and not v > 0:
            raise ValueError("dt must be > 0")
        return v

    @model_validator(mode="after")
    def validate_backend(self) -> "ScoringConfig":
        """An external predictor needs a command to run."""
        if self.predictor_backend == "external" and not self.predictor_command:
            raise ValueError("predictor_command is required for the external predictor")
        return self


class EvalConfig(BaseModel):
    """Ground-truth thresholds and the slice of objects being evaluated."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    theta1: int = Field(default=3)
    theta2: int = Field(default=2)
    category_filter: Optional[AgentKind] = Field(default=None)
    method: ScoreMethod = Field(default="ours")

    @model_validator(mode="after")
    def validate_thresholds(self) -> "EvalConfig":
        """Validate theta1 >= theta2 >= 0."""
        if self.theta2 < 0:
            raise ValueError("theta2 must be >= 0")
        if self.theta1 < self.theta2:
            raise ValueError("theta1 must be >= theta2")
        return self


def _default_workers() -> int:
    return os.cpu_count() or 1


class Config(BaseModel):
    """Top-level configuration for the importance engine."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    log_level: str = Field(default="INFO")
    workers: int = Field(default_factory=_default_workers)
    scoring: ScoringConfig = Field(default_factory=ScoringConfig)
    evaluation: EvalConfig = Field(default_factory=EvalConfig)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is a stdlib level name."""
        if v.upper() not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise ValueError(
                "log_level must be one of DEBUG, INFO, WARNING, ERROR, CRITICAL"
            )
        return v.upper()

    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        """Validate the worker pool size."""
        if v < 1:
            raise ValueError("workers must be >= 1")
        return v

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""
        load_dotenv()

        def number(name: str, cast):
            raw = os.getenv(name)
            if raw is None:
                return None
            try:
                return cast(raw)
            except ValueError as e:
                kind = "an integer" if cast is int else "a number"
                raise ValueError(f"Invalid value for {name}: must be {kind}") from e

        scoring: Dict[str, Any] = {}
        perturbation: Dict[str, Any] = {}
        evaluation: Dict[str, Any] = {}
        top: Dict[str, Any] = {}

        for env_name, target, key, cast in [
            ("IMPORTANCE_TAU", scoring, "tau", float),
            ("IMPORTANCE_HORIZON", scoring, "horizon", int),
            ("IMPORTANCE_DT", scoring, "dt", float),
            ("IMPORTANCE_SPEED_UP_FACTOR", perturbation, "speed_up_factor", float),
            ("IMPORTANCE_LANE_WIDTH", perturbation, "lane_width", float),
            ("IMPORTANCE_THETA1", evaluation, "theta1", int),
            ("IMPORTANCE_THETA2", evaluation, "theta2", int),
            ("IMPORTANCE_WORKERS", top, "workers", int),
        ]:
            value = number(env_name, cast)
            if value is not None:
                target[key] = value

        if perturbation:
            scoring["perturbation"] = perturbation
        if "LOG_LEVEL" in os.environ:
            top["log_level"] = os.environ["LOG_LEVEL"]

        return cls(scoring=scoring, evaluation=evaluation, **top)

    @classmethod
    def from_file(cls, path: str, base: Optional["Config"] = None) -> "Config":
        """Load a YAML or JSON config file on top of ``base`` (or defaults).

        Args:
            path: Path to a .yaml/.yml/.json document
            base: Configuration the file overrides

        Returns:
            Merged configuration
        """
        return (base or cls()).with_overrides(read_config_file(path))

    def with_overrides(self, overrides: Dict[str, Any]) -> "Config":
        """Return a new config with a nested mapping of overrides applied."""
        merged = _deep_merge(self.model_dump(mode="json"), overrides)
        try:
            return Config.model_validate(merged)
        except ValidationError as e:
            raise ValueError(describe_validation_error(e)) from e


def _deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(path: str) -> Dict[str, Any]:
    """Read the raw mapping of a YAML or JSON config file."""
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as e:
        raise ValueError(f"Cannot read config file {path}: {e}") from e

    try:
        if file_path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ValueError(f"Malformed config file {path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {path} must contain a mapping")
    return data
