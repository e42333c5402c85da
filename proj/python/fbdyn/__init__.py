"""Higher-order floating-base rigid-body dynamics."""

from ._fbd import (
    DimensionError,
    IoError,
    ModelError,
    NumericalError,
    RobotModel,
    TiltHexTrajectory,
    build_branched_tree,
    build_tilthex,
    equations_of_motion,
    forward_dynamics,
    hybrid_dynamics,
    inverse_dynamics,
    load_model,
    parse_model,
    propeller_allocation,
    roundtrip,
    serialize_model,
    validate,
)

__all__ = [
    "DimensionError",
    "IoError",
    "ModelError",
    "NumericalError",
    "RobotModel",
    "TiltHexTrajectory",
    "build_branched_tree",
    "build_tilthex",
    "equations_of_motion",
    "forward_dynamics",
    "hybrid_dynamics",
    "inverse_dynamics",
    "load_model",
    "parse_model",
    "propeller_allocation",
    "roundtrip",
    "serialize_model",
    "validate",
]
