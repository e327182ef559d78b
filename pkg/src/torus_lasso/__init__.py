"""Guaranteed Euler enclosures and lasso certification for invariant tori."""

from .constants import (
    BoxRegion,
    EstimationPolicy,
    LocalConstants,
    estimate_C,
    estimate_constants,
    estimate_gamma,
    estimate_lambda,
)
from .errors import (
    BoundBlowup,
    DimensionMismatch,
    EnclosureError,
    EstimationError,
    SingularityError,
    TorusLassoError,
)
from .geometry import Ball, BoundConstants, ball_inside, delta, wrapped_difference
from .integrator import Tube, euler_step, extend, propagate
from .lasso import (
    CoverReport,
    Lasso,
    LassoOutcome,
    cover,
    find_lasso,
    ring_sources,
    strobe_inside,
)
from .systems import (
    COUPLED_VDP_SOURCES,
    Scenario,
    SystemModel,
    build_system,
    coupled_vdp,
    forced_vdp,
    linear_system,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BoundBlowup",
    "BoundConstants",
    "BoxRegion",
    "COUPLED_VDP_SOURCES",
    "CoverReport",
    "DimensionMismatch",
    "EnclosureError",
    "EstimationError",
    "EstimationPolicy",
    "Lasso",
    "LassoOutcome",
    "LocalConstants",
    "Scenario",
    "SingularityError",
    "SystemModel",
    "Tube",
    "TorusLassoError",
    "ball_inside",
    "build_system",
    "coupled_vdp",
    "cover",
    "delta",
    "estimate_C",
    "estimate_constants",
    "estimate_gamma",
    "estimate_lambda",
    "euler_step",
    "extend",
    "find_lasso",
    "forced_vdp",
    "linear_system",
    "propagate",
    "ring_sources",
    "strobe_inside",
    "wrapped_difference",
]
