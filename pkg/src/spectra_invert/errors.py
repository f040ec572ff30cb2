"""Exception types raised by the solver and inversion pipelines."""


class SpectraInvertError(Exception):
    """Base class for all errors raised by this package."""


class NoBoundState(SpectraInvertError):
    """The potential supports no discrete level below its value at infinity."""


class DomainTooSmall(SpectraInvertError):
    """The wavefunction has not decayed at the domain boundary after auto-expansion."""


class BelowCritical(SpectraInvertError):
    """Trajectory queried at a coupling at or below its critical value."""


class OutOfRange(SpectraInvertError):
    """Requested value lies outside the attainable range of the function."""


class NonConvergent(SpectraInvertError):
    """Successive extrapolation estimates failed to settle."""


class DegenerateFit(SpectraInvertError):
    """Head-model fit impossible: coupling-scaled energy excess is nonpositive."""


class NonMonotone(SpectraInvertError):
    """A sequence that must be strictly monotone is not (usually derivative noise)."""


class MinimizerAtBoundary(SpectraInvertError):
    """Inner minimization touched the edge of its search range."""


class MaximizerAtBoundary(SpectraInvertError):
    """Inner maximization touched the edge of its search range after expansion."""


class KineticRangeExceeded(SpectraInvertError):
    """Kinetic-energy query far outside the tabulated and extended domain."""


class NoBracket(SpectraInvertError):
    """Root bracketing failed within the allowed expansion of the search interval."""


class OutOfValidatedRange(SpectraInvertError):
    """Bessel series evaluation requested outside its validated argument range."""


class UnsupportedShape(SpectraInvertError):
    """No closed form is available for this potential shape."""
