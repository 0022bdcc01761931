"""Reading and writing scenario, report and annotation documents."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Type, TypeVar

from pydantic import BaseModel, ValidationError

from .models.scene import Scene
from .utils.errors import (
    SceneParseError,
    SceneValidationError,
    describe_validation_error,
)

FORMAT_VERSION = "1.0"
SUPPORTED_MAJOR = 1

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def _check_version(data: Dict[str, Any], source: str) -> None:
    version = data.get("format_version")
    if version is None:
        raise SceneValidationError(f"{source}: format_version is required")
    try:
        major = int(str(version).split(".")[0])
    except ValueError as e:
        raise SceneValidationError(
            f"{source}: format_version '{version}' is not a version number"
        ) from e
    if major != SUPPORTED_MAJOR:
        raise SceneValidationError(
            f"{source}: unsupported format_version '{version}' "
            f"(this reader understands {SUPPORTED_MAJOR}.x)"
        )


def parse_document(text: str, model: Type[ModelT], source: str = "<string>") -> ModelT:
    """Parse a versioned JSON document into ``model``.

    Args:
        text: Document text
        model: Pydantic model the document (minus format_version) must satisfy
        source: Name used in error messages

    Returns:
        Validated model instance
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneParseError(f"{source}: malformed document: {e}") from e
    if not isinstance(data, dict):
        raise SceneParseError(f"{source}: document must be a JSON object")

    _check_version(data, source)
    body = {key: value for key, value in data.items() if key != "format_version"}
    try:
        return model.model_validate(body)
    except ValidationError as e:
        raise SceneValidationError(f"{source}: {describe_validation_error(e)}") from e


def dump_document(model: BaseModel) -> str:
    """Serialize a model as a versioned, deterministic JSON document."""
    body = {"format_version": FORMAT_VERSION}
    body.update(model.model_dump(mode="json", by_alias=True))
    return json.dumps(body, indent=2) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SceneParseError(f"Cannot read {path}: {e}") from e


def load_scene(path: str) -> Scene:
    """Load and validate one scenario file."""
    scene = parse_document(_read(path), Scene, source=str(path))
    logger.debug(f"Loaded scene {scene.scene_id} with {len(scene.agents)} agents")
    return scene


def dump_scene(scene: Scene) -> str:
    """Serialize a scene as a scenario document."""
    return dump_document(scene)


def save_scene(scene: Scene, path: str) -> Path:
    """Write a scenario document, creating parent directories."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dump_scene(scene), encoding="utf-8")
    logger.info(f"Scene {scene.scene_id} saved to: {out}")
    return out


def load_model(path: str, model: Type[ModelT]) -> ModelT:
    """Load any versioned document (reports, annotations) into ``model``."""
    return parse_document(_read(path), model, source=str(path))
