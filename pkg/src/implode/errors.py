"""Exception hierarchy shared by every stage of the solver."""


class ImplodeError(Exception):
    """Base class for all library errors."""


class DomainError(ImplodeError, ValueError):
    """An argument lies outside the natural domain of a formula."""


class InadmissibleError(DomainError):
    """The pair (k, ell) is outside the set where a smooth profile is known to exist."""


class RangeError(DomainError):
    """An exponent lies outside the interval where an inverse function is defined."""


class NumericalError(ImplodeError, ArithmeticError):
    """A computation produced an inconsistent or non-finite intermediate."""


class BracketError(NumericalError):
    """A monotone root search could not be bracketed."""


class PoleError(NumericalError):
    """The eigenvalue ratio sits on a pole of the sonic coefficients."""


class RadiusError(NumericalError):
    """A series was evaluated outside its estimated disc of convergence."""


class StepFailure(NumericalError):
    """The adaptive integrator could not take a step (singularity ahead)."""


class EventMissed(NumericalError):
    """An integration finished without reaching the requested event."""


class NoSignChange(NumericalError):
    """The matching residual does not change sign over the bracket."""

    def __init__(self, message, samples=()):
        super().__init__(message)
        self.samples = list(samples)


class MultipleRoots(NumericalError):
    """The matching residual changes sign more than once."""

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = list(roots)


class SeamError(NumericalError):
    """Two pieces of a glued profile disagree beyond tolerance."""


class RegionError(NumericalError):
    """A trajectory left the region in which it is trapped by theory."""


class TailWarning(RuntimeWarning):
    """A truncated series could not certify its tail below tolerance."""
