"""Exception types raised by the solver engine."""


class TTPError(Exception):
    """Base class for all solver errors."""


class InstanceFormatError(TTPError, ValueError):
    """A TTP instance file could not be parsed or failed validation."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InfeasiblePlan(TTPError):
    """A picking plan exceeds the knapsack capacity."""

    def __init__(self, overflow):
        self.overflow = overflow
        super().__init__(f"picking plan exceeds capacity by {overflow:g}")


class StalePreview(TTPError):
    """A move preview was committed against a state that changed after it was taken."""


class ExternalTourInvalid(TTPError, ValueError):
    """An externally supplied tour is not a permutation of the cities."""


class InstanceTooLarge(TTPError):
    """The instance is beyond the exhaustive oracle's size guard."""
