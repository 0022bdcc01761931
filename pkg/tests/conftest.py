"""Shared test fixtures for all test modules.

Scenes come from the synthetic generator so every test module sees the same
geometry. ``scene_file`` writes any scene to a temporary scenario document
for the file-based layers (storage, orchestrator, CLI).

Example:
    def test_something(lead_follow_scene, scene_file):
        path = scene_file(lead_follow_scene)
"""

import json
from typing import Iterable

import numpy as np
import pytest

from src.kinds import AgentKind
from src.models.scene import Scene, Trajectory, Vec2
from src.storage import save_scene
from src.synth import SynthKind, SynthSpec, generate, make_agent


@pytest.fixture
def lead_follow_scene() -> Scene:
    """Ego behind a stopped lead vehicle, two parked cars off the road."""
    return generate(SynthSpec(kind=SynthKind.LEAD_FOLLOW))


@pytest.fixture
def adjacent_lane_scene() -> Scene:
    """A vehicle driving alongside the ego in the left lane."""
    return generate(SynthSpec(kind=SynthKind.ADJACENT_LANE))


@pytest.fixture
def jaywalker_scene() -> Scene:
    """A pedestrian stepping onto the road ahead and one far away."""
    return generate(SynthSpec(kind=SynthKind.JAYWALKER))


@pytest.fixture
def empty_scene() -> Scene:
    """The ego alone on its route."""
    return Scene(
        scene_id="empty",
        ego=make_agent("ego", (0.0, 0.0), 0.0, 8.0),
        route=(Vec2(x=-20.0, y=0.0), Vec2(x=200.0, y=0.0)),
    )


@pytest.fixture
def make_scene():
    """Factory for small scenes on the standard straight route."""

    def _make(
        agents: Iterable = (),
        scene_id: str = "custom",
        ego_speed: float = 8.0,
        **kwargs,
    ) -> Scene:
        return Scene(
            scene_id=scene_id,
            ego=make_agent("ego", (0.0, 0.0), 0.0, ego_speed),
            route=(Vec2(x=-20.0, y=0.0), Vec2(x=200.0, y=0.0)),
            agents=tuple(agents),
            **kwargs,
        )

    return _make


@pytest.fixture
def vehicle():
    """Factory for constant-velocity vehicles (position, heading, speed)."""

    def _vehicle(agent_id, position, heading=0.0, speed=0.0):
        return make_agent(agent_id, position, heading, speed, AgentKind.VEHICLE)

    return _vehicle


@pytest.fixture
def straight_trajectory() -> Trajectory:
    """Twenty waypoints 2 m apart along +x starting at (2, 0)."""
    xs = 2.0 * np.arange(1, 21)
    return Trajectory(np.column_stack([xs, np.zeros(20)]), 0.25)


@pytest.fixture
def scene_file(tmp_path):
    """Write a scene as a scenario document and return its path."""

    def _write(scene: Scene, name: str = None) -> str:
        path = tmp_path / (name or f"{scene.scene_id}.json")
        save_scene(scene, str(path))
        return str(path)

    return _write


@pytest.fixture
def write_json(tmp_path):
    """Write any JSON-serializable value to a temporary file."""

    def _write(data, name: str) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write
