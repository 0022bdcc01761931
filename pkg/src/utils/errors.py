"""Exception hierarchy for the importance engine."""


class ImportanceError(Exception):
    """Base class for all engine errors."""


class SceneParseError(ImportanceError):
    """A scenario or report document could not be parsed."""


class SceneValidationError(ImportanceError, ValueError):
    """A document parsed but violates a scene invariant."""


class UnknownAgentError(ImportanceError, KeyError):
    """An agent id is not present (or is the ego) in the scene."""

    def __str__(self) -> str:
        # KeyError quotes its message by default
        return str(self.args[0]) if self.args else ""


class InsufficientHistoryError(ImportanceError, ValueError):
    """An agent has fewer history samples than the velocity estimate needs."""


class DegenerateRouteError(ImportanceError, ValueError):
    """The ego route has zero length."""


class EvaluationError(ImportanceError, ValueError):
    """Scores and annotations cannot be evaluated together."""


class PredictorError(ImportanceError):
    """An external trajectory predictor failed or returned garbage."""


def describe_validation_error(error) -> str:
    """Flatten a pydantic ``ValidationError`` into "field.path: message" parts."""
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)
