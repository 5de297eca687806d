"""Exception hierarchy.

Every domain error derives from :class:`DickeCorrelationError` so callers
(and the command line front end) can catch the whole family at once.
"""


class DickeCorrelationError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidStateError(DickeCorrelationError, ValueError):
    """A matrix failed one of the density-operator invariants.

    Attributes
    ----------
    magnitude : float
        Size of the violation (e.g. the most negative eigenvalue).
    """

    def __init__(self, message, magnitude=float("nan")):
        super().__init__(message)
        self.magnitude = magnitude


class NonHermitian(InvalidStateError):
    pass


class TraceNotOne(InvalidStateError):
    pass


class NotPositiveSemidefinite(InvalidStateError):
    pass


class NotXState(InvalidStateError):
    """Entries outside the diagonal/anti-diagonal are not negligible."""


class NegativeDiscriminant(InvalidStateError):
    pass


class ResultNotPSD(InvalidStateError):
    pass


class DegenerateBlock(DickeCorrelationError, ArithmeticError):
    """A 2x2 block of an X state is numerically zero.

    The closed-form square root divides by ``sqrt(t + 2 sqrt(d))``; callers
    should fall back to :func:`dicke_correlations.states.hermitian_sqrt_generic`.
    """


class ZeroSeparation(DickeCorrelationError, ValueError):
    pass


class GammaOutOfRange(DickeCorrelationError, ValueError):
    pass


class BudgetTooSmall(DickeCorrelationError, ValueError):
    pass


class ConfigError(DickeCorrelationError, ValueError):
    """Invalid run configuration; the message names the offending field."""


class LargeShiftWarning(UserWarning):
    """The dipole-dipole shift is huge (very small separation)."""
