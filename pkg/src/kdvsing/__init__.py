"""Singularity patterns and dynamical degrees of the discrete KdV lattice and its reductions."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigInvalid,
    DegenerateOrbit,
    DegenerateSample,
    EmptyPattern,
    ExactZeroReciprocal,
    InconclusiveProbe,
    IndeterminateStep,
    InterpolationInconsistent,
    KdVSingError,
    OrbitCollapse,
    ProbableIdentityZero,
    SameStepUnsupported,
    TruncationExhausted,
    Unclassifiable,
    UndeterminedLeading,
    WindowUndetermined,
)
from .exactnum import GF, INFINITY, LaurentSeries, Projective, classify_entry, qq  # noqa: F401
from .mapping import MapParams, orbit, phi1_closed_form, phi_backward, phi_forward  # noqa: F401
