"""Exception types raised by the design and simulation pipeline."""


class IntervalObserverError(Exception):
    """Base class for every error raised by this package."""

    #: short identifier used in CLI diagnostics
    code = "Error"


class DimensionError(IntervalObserverError, ValueError):
    code = "DimensionMismatch"


class OrderingError(IntervalObserverError, ValueError):
    """A lower bound exceeds its upper bound."""

    code = "UnorderedBounds"


class ValidationError(IntervalObserverError, ValueError):
    code = "ValidationFailed"

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class SpectraOverlap(IntervalObserverError):
    code = "SpectraOverlap"


class NearSingular(IntervalObserverError):
    code = "NearSingular"


class NearSingularT(NearSingular):
    code = "NearSingularT"


class NotStable(IntervalObserverError):
    code = "NotStable"


class NearDefective(IntervalObserverError):
    code = "NearDefective"


class ZeroObservableRank(IntervalObserverError):
    code = "ZeroObservableRank"


class NotDetectable(IntervalObserverError):
    code = "NotDetectable"


class InvalidGain(IntervalObserverError, ValueError):
    """User-supplied observer gains violate the positivity/stability requirements."""

    code = "InvalidGain"


class SignalSyntaxError(IntervalObserverError, SyntaxError):
    code = "SignalSyntax"

    def __init__(self, message, text="", position=0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class EnvelopeViolation(IntervalObserverError):
    """A true disturbance/noise realization left its declared envelope."""

    code = "EnvelopeViolation"


class DivergenceError(IntervalObserverError):
    code = "Divergence"
