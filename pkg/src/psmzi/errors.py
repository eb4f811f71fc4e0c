"""Exception hierarchy shared by all psmzi modules."""


class PsmziError(Exception):
    """Base class for every error raised by this package."""


class OutOfRangeError(PsmziError, ValueError):
    """A configuration field violates its bound."""

    def __init__(self, field, value, bound):
        self.field = field
        self.value = value
        self.bound = bound
        super().__init__(f"{field}={value!r} out of range: {bound}")


class CapOverflowError(PsmziError):
    pass


class OrderExceedsCapError(PsmziError):
    pass


class VarSetMismatchError(PsmziError):
    pass


class DegenerateStateError(PsmziError):
    """Photon subtraction annihilates the state (zero success probability)."""


class NegativeVarianceError(PsmziError):
    pass


class UndefinedSensitivityError(PsmziError):
    """The phase derivative of the signal vanishes (stationary point)."""


class NoFinitePointError(PsmziError):
    pass


class ZeroInformationError(PsmziError):
    pass


class CutoffTooSmallError(PsmziError):
    pass


class ZeroNormError(PsmziError):
    pass


class InsufficientHeadroomError(PsmziError):
    pass


class ToleranceBreachError(PsmziError):
    def __init__(self, message, worst=None):
        self.worst = worst
        super().__init__(message)
