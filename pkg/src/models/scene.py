"""Scene, agent and trajectory types."""

import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.errors import UnknownAgentError
from ..kinds import AgentKind

DEFAULT_HORIZON = 20
DEFAULT_DT = 0.25
DEFAULT_LANE_WIDTH = 3.5
MIN_HISTORY = 5

# Relative tolerance for uniform history spacing
_SPACING_TOLERANCE = 1e-6


class Vec2(BaseModel):
    """A planar point or vector in meters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x: float
    y: float

    @field_validator("x", "y")
    @classmethod
    def validate_finite(cls, v: float, info) -> float:
        """Reject NaN and infinite coordinates."""
        if not math.isfinite(v):
            raise ValueError(f"{info.field_name} must be finite")
        return v

    def as_array(self) -> np.ndarray:
        """Return the vector as a float64 array of shape (2,)."""
        return np.array([self.x, self.y], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Vec2":
        """Build a Vec2 from any length-2 sequence."""
        return cls(x=float(values[0]), y=float(values[1]))


class HistorySample(BaseModel):
    """One past observation of an agent."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    position: Vec2
    t: float


class AgentState(BaseModel):
    """Snapshot of one traffic participant with its short history.

    ``history`` holds past samples only; ``position`` is the sample one time
    step after the last history entry.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    kind: AgentKind = AgentKind.VEHICLE
    position: Vec2
    heading: float = 0.0
    speed: float = 0.0
    half_extent: Vec2 = Field(default=Vec2(x=2.25, y=1.0))
    history: Tuple[HistorySample, ...]

    @field_validator("id")
    @classmethod
    def validate_id(cls, v: str) -> str:
        """Validate the id is a non-empty string."""
        if not v:
            raise ValueError("id must be a non-empty string")
        return v

    @field_validator("heading")
    @classmethod
    def validate_heading(cls, v: float) -> float:
        """Validate heading lies in [-pi, pi)."""
        if not (math.isfinite(v) and -math.pi <= v < math.pi):
            raise ValueError("heading must be in [-pi, pi)")
        return v

    @field_validator("speed")
    @classmethod
    def validate_speed(cls, v: float) -> float:
        """Validate speed is finite and non-negative."""
        if not (math.isfinite(v) and v >= 0):
            raise ValueError("speed must be >= 0")
        return v

    @field_validator("half_extent")
    @classmethod
    def validate_half_extent(cls, v: Vec2) -> Vec2:
        """Validate bounding half-dimensions are positive."""
        if v.x <= 0 or v.y <= 0:
            raise ValueError("half_extent components must be > 0")
        return v

    @field_validator("history")
    @classmethod
    def validate_history(
        cls, v: Tuple[HistorySample, ...]
    ) -> Tuple[HistorySample, ...]:
        """Validate the history is long enough and strictly increasing."""
        if len(v) < MIN_HISTORY:
            raise ValueError(f"history length < {MIN_HISTORY}")
        times = [sample.t for sample in v]
        if any(not math.isfinite(t) for t in times):
            raise ValueError("history timestamps must be finite")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("history timestamps must be strictly increasing")
        return v

    def history_step(self) -> float:
        """Spacing of the history timestamps (assumed uniform)."""
        return self.history[1].t - self.history[0].t

    def track(self) -> np.ndarray:
        """History positions followed by the current position, shape (n + 1, 2)."""
        points = [sample.position.as_array() for sample in self.history]
        points.append(self.position.as_array())
        return np.stack(points)


class Scene(BaseModel):
    """One timestamped snapshot of the ego vehicle and its surroundings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scene_id: str
    ego: AgentState
    route: Tuple[Vec2, ...]
    agents: Tuple[AgentState, ...] = ()
    lane_width: float = DEFAULT_LANE_WIDTH
    dt: float = DEFAULT_DT
    horizon: int = DEFAULT_HORIZON

    @field_validator("lane_width", "dt")
    @classmethod
    def validate_positive(cls, v: float, info) -> float:
        """Validate strictly positive geometry parameters."""
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{info.field_name} must be > 0")
        return v

    @field_validator("horizon")
    @classmethod
    def validate_horizon(cls, v: int) -> int:
        """Validate the horizon is a positive integer."""
        if v < 1:
            raise ValueError("horizon must be a positive integer")
        return v

    @field_validator("route")
    @classmethod
    def validate_route(cls, v: Tuple[Vec2, ...]) -> Tuple[Vec2, ...]:
        """Validate the route is a polyline with non-coincident vertices."""
        if len(v) < 2:
            raise ValueError("route must have at least 2 points")
        for i, (a, b) in enumerate(zip(v, v[1:])):
            if a.x == b.x and a.y == b.y:
                raise ValueError(f"route points {i} and {i + 1} coincide")
        return v

    @model_validator(mode="after")
    def validate_scene(self) -> "Scene":
        """Cross-field invariants: ids, ego kind and history spacing."""
        if self.ego.kind != AgentKind.VEHICLE:
            raise ValueError("ego.kind must be vehicle")

        seen = {self.ego.id}
        for agent in self.agents:
            if agent.id in seen:
                if agent.id == self.ego.id:
                    raise ValueError(f"agents: id '{agent.id}' collides with ego id")
                raise ValueError(f"agents: duplicate agent id '{agent.id}'")
            seen.add(agent.id)

        for label, agent in [("ego", self.ego)] + [
            (f"agents[{i}]", a) for i, a in enumerate(self.agents)
        ]:
            times = [sample.t for sample in agent.history]
            for a, b in zip(times, times[1:]):
                if abs((b - a) - self.dt) > _SPACING_TOLERANCE * max(1.0, self.dt):
                    raise ValueError(
                        f"{label}.history: timestamps must be spaced at dt={self.dt}"
                    )
        return self

    def agent(self, agent_id: str) -> AgentState:
        """Look up a non-ego agent by id."""
        for agent in self.agents:
            if agent.id == agent_id:
                return agent
        raise UnknownAgentError(f"Unknown agent id: {agent_id}")

    def agent_ids(self) -> List[str]:
        """Ids of the non-ego agents, in document order."""
        return [agent.id for agent in self.agents]


def scene_without_agent(scene: Scene, agent_id: str) -> Scene:
    """Return the scene with one non-ego agent removed.

    Args:
        scene: Source scene
        agent_id: Id of the agent to remove

    Returns:
        Scene identical to ``scene`` except for the missing agent

    Raises:
        UnknownAgentError: if the id is the ego or not present
    """
    if agent_id == scene.ego.id:
        raise UnknownAgentError(f"The ego vehicle '{agent_id}' is not removable")
    remaining = tuple(agent for agent in scene.agents if agent.id != agent_id)
    if len(remaining) == len(scene.agents):
        raise UnknownAgentError(f"Unknown agent id: {agent_id}")
    return scene.model_copy(update={"agents": remaining})


def _wrap_angle(angle: float) -> float:
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped < 0:
        wrapped += 2.0 * math.pi
    wrapped -= math.pi
    # fmod rounding can land exactly on +pi
    return -math.pi if wrapped >= math.pi else wrapped


def transform_scene(
    scene: Scene, rotation: float, translation: Tuple[float, float] = (0.0, 0.0)
) -> Scene:
    """Apply one global rigid motion (rotate about the origin, then translate)."""
    cos_r, sin_r = math.cos(rotation), math.sin(rotation)
    tx, ty = translation

    def move(p: Vec2) -> Vec2:
        return Vec2(
            x=cos_r * p.x - sin_r * p.y + tx,
            y=sin_r * p.x + cos_r * p.y + ty,
        )

    def move_agent(agent: AgentState) -> AgentState:
        return agent.model_copy(
            update={
                "position": move(agent.position),
                "heading": _wrap_angle(agent.heading + rotation),
                "history": tuple(
                    HistorySample(position=move(s.position), t=s.t)
                    for s in agent.history
                ),
            }
        )

    return scene.model_copy(
        update={
            "ego": move_agent(scene.ego),
            "route": tuple(move(p) for p in scene.route),
            "agents": tuple(move_agent(a) for a in scene.agents),
        }
    )


class Trajectory:
    """K timestamped planar waypoints at a fixed step.

    Waypoint ``i`` is the position at time ``(i + 1) * dt`` after the scene
    snapshot. The underlying array is read-only.
    """

    __slots__ = ("_points", "_dt")

    def __init__(self, points: Iterable, dt: float):
        array = np.array(points, dtype=np.float64)
        if array.ndim != 2 or array.shape[1] != 2 or array.shape[0] < 1:
            raise ValueError(
                f"trajectory points must have shape (K, 2), got {array.shape}"
            )
        if not np.all(np.isfinite(array)):
            raise ValueError("trajectory coordinates must be finite")
        if not (math.isfinite(dt) and dt > 0):
            raise ValueError("trajectory dt must be > 0")
        array.setflags(write=False)
        self._points = array
        self._dt = float(dt)

    @property
    def points(self) -> np.ndarray:
        """Waypoints as a read-only (K, 2) array."""
        return self._points

    @property
    def dt(self) -> float:
        return self._dt

    @property
    def waypoints(self) -> List[Vec2]:
        """Waypoints as Vec2 values."""
        return [Vec2.from_array(p) for p in self._points]

    def __len__(self) -> int:
        return int(self._points.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self._dt == other._dt and np.array_equal(self._points, other._points)

    def __hash__(self) -> int:
        return hash((self._dt, self._points.tobytes()))

    def __repr__(self) -> str:
        return f"Trajectory(K={len(self)}, dt={self._dt})"

    def step_lengths(self) -> np.ndarray:
        """Distances between consecutive waypoints, shape (K - 1,)."""
        return np.linalg.norm(np.diff(self._points, axis=0), axis=1)

    def arc_length(self) -> float:
        """Total path length through the waypoints."""
        return float(self.step_lengths().sum())

    def to_list(self) -> List[List[float]]:
        """Plain nested lists, for serialization."""
        return self._points.tolist()
