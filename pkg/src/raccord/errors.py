"""Exception types shared across the package."""


class RaccordError(Exception):
    """Base class for solver and configuration failures."""


class PeriodMismatchError(RaccordError):
    """The two endpoint waves do not share a common period."""


class UnsupportedPeriodError(RaccordError):
    """No exact rational period is available, so no common period exists."""


class IntervalError(RaccordError):
    """The connection interval is incompatible with the requested solver."""


class AlignmentError(RaccordError):
    """A discretization grid cannot be aligned with the problem geometry."""

    def __init__(self, message, suggested_m=None):
        super().__init__(message)
        self.suggested_m = suggested_m


class ConditioningError(RaccordError):
    """A linear system required by a solver is numerically singular."""


class WaveformSyntaxError(ValueError):
    """Malformed waveform expression; carries position and expectation."""

    def __init__(self, message, position, expected=None):
        detail = f"at position {position}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
        self.position = position
        self.expected = expected
