"""Moving-frame calculus on the first Heisenberg group.

Curve and surface invariants under the pseudo-hermitian rigid motions,
reconstruction from invariants, closed-form geodesics, p-area and a
Monte Carlo check of the horizontal-line Crofton formula.
"""

from heisframe.errors import (
    DegenerateAmplitude,
    DegenerateFrame,
    EmptyMesh,
    GridMismatch,
    HeisError,
    IntegrabilityViolated,
    NearSingular,
    NonHorizontal,
    NotHorizontallyRegular,
    NotNormalParametrization,
    SingularPointEncountered,
    TooFarFromGroup,
    TransversalNotFound,
)
from heisframe.heis_core import (
    FrameCoefficients,
    HeisPoint,
    TangentVector,
    almost_complex,
    contact_form,
    group_inv,
    group_mul,
    levi_inner,
    split_velocity,
    standard_frame,
)
from heisframe.rigid_motion import (
    MaurerCartanValue,
    OrientedFrame,
    RigidMotion,
    apply,
    compose,
    frame_to_motion,
    inverse,
    motion_to_frame,
    moving_frame_step,
    retract,
    validate,
)

__all__ = [
    "DegenerateAmplitude",
    "DegenerateFrame",
    "EmptyMesh",
    "GridMismatch",
    "HeisError",
    "IntegrabilityViolated",
    "NearSingular",
    "NonHorizontal",
    "NotHorizontallyRegular",
    "NotNormalParametrization",
    "SingularPointEncountered",
    "TooFarFromGroup",
    "TransversalNotFound",
    "FrameCoefficients",
    "HeisPoint",
    "TangentVector",
    "almost_complex",
    "contact_form",
    "group_inv",
    "group_mul",
    "levi_inner",
    "split_velocity",
    "standard_frame",
    "MaurerCartanValue",
    "OrientedFrame",
    "RigidMotion",
    "apply",
    "compose",
    "frame_to_motion",
    "inverse",
    "motion_to_frame",
    "moving_frame_step",
    "retract",
    "validate",
]

__version__ = "0.1.0"
