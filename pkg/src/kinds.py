"""Enumerations shared across the engine."""

from enum import Enum


class AgentKind(str, Enum):
    """Category of a traffic participant."""

    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"


class PerturbationKind(str, Enum):
    """Counterfactual trajectory perturbations, in canonical order."""

    HARD_STOP = "hard_stop"
    SPEED_UP = "speed_up"
    LANE_CHANGE_LEFT = "lane_change_left"
    LANE_CHANGE_RIGHT = "lane_change_right"


# Label of the unperturbed trajectory in variant lists
PREDICTED = "predicted"

# Group names accepted wherever perturbations are toggled by name
PERTURBATION_GROUPS = {
    "hard_stop": (PerturbationKind.HARD_STOP,),
    "speed_up": (PerturbationKind.SPEED_UP,),
    "lane_change": (
        PerturbationKind.LANE_CHANGE_LEFT,
        PerturbationKind.LANE_CHANGE_RIGHT,
    ),
    "lane_change_left": (PerturbationKind.LANE_CHANGE_LEFT,),
    "lane_change_right": (PerturbationKind.LANE_CHANGE_RIGHT,),
}


class GroundTruthLabel(str, Enum):
    """Resolved annotation label of one object."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    IGNORED = "ignored"
