"""Exception hierarchy shared by all modules."""


class KdVSingError(Exception):
    """Base class for every error raised by this package."""


class ExactZeroReciprocal(KdVSingError, ZeroDivisionError):
    """Reciprocal of a series that is exactly zero."""


class UndeterminedLeading(KdVSingError):
    """All known coefficients of a series vanished; raise the truncation order."""


class IndeterminateStep(KdVSingError):
    """Projective evaluation hit 0/0, inf-inf, 0*inf or inf/inf.

    Rerun the orbit with an epsilon-regularised seed instead.
    """


class DegenerateOrbit(KdVSingError):
    """A closed-form factor vanished on the requested orbit."""


class TruncationExhausted(KdVSingError):
    """Adaptive doubling of the truncation order hit its cap."""


class DegenerateSample(KdVSingError):
    """A sampled initial state produced an accidental exact zero."""


class ProbableIdentityZero(DegenerateSample):
    """Accidental zeros survived every resample; the zero is likely structural."""


class InconclusiveProbe(KdVSingError):
    """Two dependence probes with different sample counts disagree."""


class Unclassifiable(KdVSingError):
    """No classification rule fired within the iteration window."""

    def __init__(self, message, signatures=None):
        super().__init__(message)
        self.signatures = signatures


class EmptyPattern(KdVSingError):
    """A value-count pattern carries no (or a trivially balanced) 0/inf data."""


class OrbitCollapse(KdVSingError):
    """An exact orbit hit a singular value repeatedly."""


class InterpolationInconsistent(KdVSingError):
    """Rational reconstruction failed verification at every degree bound."""


class WindowUndetermined(KdVSingError):
    """A requested lattice cell lacks the data needed to compute it."""


class SameStepUnsupported(KdVSingError):
    """Two zeros on the same staircase step (codimension > 1)."""


class ConfigInvalid(KdVSingError, ValueError):
    """A run configuration failed validation."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
