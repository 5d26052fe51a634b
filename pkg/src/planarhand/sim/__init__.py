"""Deterministic fixed-step planar physics for compliant digit hands."""

from .geometry import PlanarPose, wrap_angle
from .specs import (
    AirMassVector,
    DigitSpec,
    HandSpec,
    JointSpec,
    ObjectSpec,
    SpecError,
    box_object,
    disc_object,
    hand_spec_from_dict,
    hand_spec_to_dict,
    load_hand_spec,
    load_object_spec,
    object_spec_from_dict,
    object_spec_to_dict,
    rest_configuration,
    square_object,
)
from .world import (
    DEFAULT_DT,
    ContactPoint,
    PlacementError,
    Simulation,
    SimulationError,
    WorldState,
)

__all__ = [
    "AirMassVector",
    "ContactPoint",
    "DEFAULT_DT",
    "DigitSpec",
    "HandSpec",
    "JointSpec",
    "ObjectSpec",
    "PlanarPose",
    "PlacementError",
    "Simulation",
    "SimulationError",
    "SpecError",
    "WorldState",
    "box_object",
    "disc_object",
    "hand_spec_from_dict",
    "hand_spec_to_dict",
    "load_hand_spec",
    "load_object_spec",
    "object_spec_from_dict",
    "object_spec_to_dict",
    "rest_configuration",
    "square_object",
    "wrap_angle",
]
