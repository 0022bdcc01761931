"""Deterministic synthetic scenarios used as fixtures and demos.

Every fixture puts the ego at the origin heading +x on a straight route. The
geometries below are versioned: bump FIXTURE_VERSION when any default moves,
since acceptance numbers depend on them.
"""

import logging
import math
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .kinds import AgentKind
from .models.scene import (
    DEFAULT_DT,
    DEFAULT_HORIZON,
    DEFAULT_LANE_WIDTH,
    MIN_HISTORY,
    AgentState,
    HistorySample,
    Scene,
    Vec2,
)

FIXTURE_VERSION = "1"

EGO_ID = "ego"
EGO_SPEED = 8.0
ROUTE_START = -20.0
ROUTE_END = 200.0

VEHICLE_HALF_EXTENT = Vec2(x=2.25, y=1.0)
PEDESTRIAN_HALF_EXTENT = Vec2(x=0.3, y=0.3)

logger = logging.getLogger(__name__)


class SynthKind(str, Enum):
    """Families of synthetic scenes."""

    LEAD_FOLLOW = "lead_follow"
    ADJACENT_LANE = "adjacent_lane"
    INTERSECTION_CROSS = "intersection_cross"
    JAYWALKER = "jaywalker"
    RANDOM = "random"


# Default parameters per kind; keys not listed here are rejected
DEFAULT_PARAMS: Dict[SynthKind, Dict[str, float]] = {
    SynthKind.LEAD_FOLLOW: {
        "gap": 10.0,
        "lead_speed": 0.0,
        "parked": 2,
        "parked_offset": 15.0,
        "jitter": 0.0,
    },
    SynthKind.ADJACENT_LANE: {
        "offset": DEFAULT_LANE_WIDTH,
        "gap": 2.0,
        "speed": EGO_SPEED,
        "side": 1.0,
        "jitter": 0.0,
    },
    SynthKind.INTERSECTION_CROSS: {
        "crossing_station": 20.0,
        "speed": EGO_SPEED,
        "jitter": 0.0,
    },
    SynthKind.JAYWALKER: {
        "distance": 12.0,
        "lateral": 1.0,
        "walk_speed": 1.0,
        "far_distance": 30.0,
        "far_lateral": 6.0,
        "jitter": 0.0,
    },
    SynthKind.RANDOM: {
        "n_agents": 6,
        "pedestrian_ratio": 0.2,
        "extent": 40.0,
        "jitter": 0.0,
    },
}

_COUNT_PARAMS = {"parked", "n_agents"}
_SIGNED_PARAMS = {"side", "lateral", "far_lateral"}
_POSITIVE_PARAMS = {
    "gap",
    "offset",
    "crossing_station",
    "distance",
    "far_distance",
    "extent",
}


class SynthSpec(BaseModel):
    """What to generate: a scene family, a seed and its parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: SynthKind
    seed: int = 0
    params: Dict[str, float] = Field(default_factory=dict)

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        """Validate the seed fits in 64 unsigned bits."""
        if not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v

    def resolved_params(self) -> Dict[str, float]:
        """Defaults overlaid with the given params, validated."""
        defaults = DEFAULT_PARAMS[self.kind]
        unknown = sorted(set(self.params) - set(defaults))
        if unknown:
            raise ValueError(
                f"Unknown parameter(s) for {self.kind.value}: {', '.join(unknown)}"
            )
        params = {**defaults, **self.params}
        for name, value in params.items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            if name in _COUNT_PARAMS and (value < 0 or value != int(value)):
                raise ValueError(f"{name} must be a non-negative integer")
            if name in _POSITIVE_PARAMS and not value > 0:
                raise ValueError(f"{name} must be > 0")
            if name not in _SIGNED_PARAMS and value < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.kind == SynthKind.ADJACENT_LANE and params["side"] not in (-1.0, 1.0):
            raise ValueError("side must be 1 (left) or -1 (right)")
        if self.kind == SynthKind.RANDOM and not 0 <= params["pedestrian_ratio"] <= 1:
            raise ValueError("pedestrian_ratio must be in [0, 1]")
        return params


def make_agent(
    agent_id: str,
    position: Tuple[float, float],
    heading: float,
    speed: float,
    kind: AgentKind = AgentKind.VEHICLE,
    dt: float = DEFAULT_DT,
    samples: int = MIN_HISTORY,
) -> AgentState:
    """Agent moving at constant velocity, with a matching back-projected history."""
    direction = np.array([math.cos(heading), math.sin(heading)])
    current = np.array(position, dtype=np.float64)
    history = []
    for j in range(samples):
        steps_back = samples - j
        past = current - steps_back * dt * speed * direction
        history.append(
            HistorySample(position=Vec2.from_array(past), t=-steps_back * dt)
        )
    return AgentState(
        id=agent_id,
        kind=kind,
        position=Vec2.from_array(current),
        heading=heading,
        speed=speed,
        half_extent=(
            PEDESTRIAN_HALF_EXTENT
            if kind == AgentKind.PEDESTRIAN
            else VEHICLE_HALF_EXTENT
        ),
        history=tuple(history),
    )


def _ego() -> AgentState:
    return make_agent(EGO_ID, (0.0, 0.0), 0.0, EGO_SPEED)


def _route() -> Tuple[Vec2, ...]:
    return (Vec2(x=ROUTE_START, y=0.0), Vec2(x=ROUTE_END, y=0.0))


Placement = Tuple[str, Tuple[float, float], float, float, AgentKind]


def _lead_follow(
    params: Dict[str, float], rng: np.random.Generator
) -> List[Placement]:
    placements: List[Placement] = [
        ("lead", (params["gap"], 0.0), 0.0, params["lead_speed"], AgentKind.VEHICLE)
    ]
    offset = params["parked_offset"]
    for i in range(int(params["parked"])):
        # alternate sides, 20 m apart along the route
        side = 1.0 if i % 2 == 0 else -1.0
        placements.append(
            (
                f"parked_{i}",
                (20.0 * (i + 1), side * offset),
                0.0,
                0.0,
                AgentKind.VEHICLE,
            )
        )
    return placements


def _adjacent_lane(
    params: Dict[str, float], rng: np.random.Generator
) -> List[Placement]:
    position = (params["gap"], params["side"] * params["offset"])
    return [("adjacent", position, 0.0, params["speed"], AgentKind.VEHICLE)]


def _intersection_cross(
    params: Dict[str, float], rng: np.random.Generator
) -> List[Placement]:
    # arrive at the crossing point when an unimpeded ego would
    arrival = params["crossing_station"] / EGO_SPEED
    start = (params["crossing_station"], -params["speed"] * arrival)
    return [("crossing", start, math.pi / 2.0, params["speed"], AgentKind.VEHICLE)]


def _jaywalker(
    params: Dict[str, float], rng: np.random.Generator
) -> List[Placement]:
    lateral = params["lateral"]
    # walk toward the route centerline
    heading = math.pi / 2.0 if lateral > 0 else -math.pi / 2.0
    return [
        (
            "ped_near",
            (params["distance"], -lateral),
            heading,
            params["walk_speed"],
            AgentKind.PEDESTRIAN,
        ),
        (
            "ped_far",
            (params["far_distance"], params["far_lateral"]),
            0.0,
            0.0,
            AgentKind.PEDESTRIAN,
        ),
    ]


def _random(
    params: Dict[str, float], rng: np.random.Generator
) -> List[Placement]:
    extent = params["extent"]
    placements: List[Placement] = []
    for i in range(int(params["n_agents"])):
        pedestrian = rng.random() < params["pedestrian_ratio"]
        x = rng.uniform(-extent, 1.5 * extent)
        y = rng.uniform(-extent / 2.0, extent / 2.0)
        heading = rng.uniform(-math.pi, math.pi)
        speed = rng.uniform(0.0, 1.5) if pedestrian else rng.uniform(0.0, 10.0)
        kind = AgentKind.PEDESTRIAN if pedestrian else AgentKind.VEHICLE
        placements.append((f"agent_{i}", (x, y), heading, speed, kind))
    return placements


_BUILDERS: Dict[
    SynthKind, Callable[[Dict[str, float], np.random.Generator], List[Placement]]
] = {
    SynthKind.LEAD_FOLLOW: _lead_follow,
    SynthKind.ADJACENT_LANE: _adjacent_lane,
    SynthKind.INTERSECTION_CROSS: _intersection_cross,
    SynthKind.JAYWALKER: _jaywalker,
    SynthKind.RANDOM: _random,
}


def generate(spec: SynthSpec, scene_id: Optional[str] = None) -> Scene:
    """Build the scene described by ``spec``.

    Args:
        spec: Scene family, seed and parameters
        scene_id: Override of the default "<kind>-<seed>" identifier

    Returns:
        A validated Scene

    Raises:
        ValueError: on unknown or out-of-range parameters
    """
    params = spec.resolved_params()
    rng = np.random.default_rng(spec.seed)
    placements = _BUILDERS[spec.kind](params, rng)

    jitter = params["jitter"]
    agents = []
    for agent_id, (x, y), heading, speed, kind in placements:
        if jitter > 0:
            dx, dy = rng.normal(0.0, jitter, size=2)
            x, y = x + float(dx), y + float(dy)
        agents.append(make_agent(agent_id, (x, y), heading, speed, kind))

    scene = Scene(
        scene_id=scene_id or f"{spec.kind.value}-{spec.seed}",
        ego=_ego(),
        route=_route(),
        agents=tuple(agents),
        lane_width=DEFAULT_LANE_WIDTH,
        dt=DEFAULT_DT,
        horizon=DEFAULT_HORIZON,
    )
    logger.debug(
        f"Generated {scene.scene_id} (fixtures v{FIXTURE_VERSION}) "
        f"with {len(agents)} agents"
    )
    return scene


def parse_params(pairs: List[str]) -> Dict[str, float]:
    """Parse ``key=value`` strings from the command line."""
    params: Dict[str, float] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"Parameter '{pair}' must look like key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError as e:
            raise ValueError(f"Parameter '{key}' must be a number") from e
    return params
