"""Exception hierarchy shared by every module of the lab."""


class BergmanLabError(Exception):
    """Base class for all errors raised by bergman_lab."""


class InvalidArgument(BergmanLabError, ValueError):
    pass


class DomainError(BergmanLabError, ValueError):
    """A point lies outside the domain an operation is defined on."""


class NearSingular(BergmanLabError, ArithmeticError):
    pass


class UnsupportedCase(BergmanLabError):
    """Parameters fall outside the range the sharp results cover."""


class DivergentIntegral(BergmanLabError, ArithmeticError):
    """An integral is analytically infinite (exponent bookkeeping, not overflow)."""


class AnalyticNonintegrable(DivergentIntegral):
    """A weight fails local integrability at a singular point of a region.

    Carries the offending factor description and the violated threshold so the
    CLI can echo them in its structured record.
    """

    def __init__(self, message, factor=None, threshold=None):
        super().__init__(message)
        self.factor = factor
        self.threshold = threshold


class QuadratureError(BergmanLabError, RuntimeError):
    """Adaptive integration hit its subdivision limit before meeting tolerance."""
