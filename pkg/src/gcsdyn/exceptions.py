"""Exception types raised by the numerical routines."""

from __future__ import annotations


class GCSError(Exception):
    """Base class for all package errors."""


class TimedError(GCSError):
    """An error tied to a point on the time axis.

    Parameters
    ----------
    message : str
        Human readable description.
    time : float
        Time at which the failure was detected.
    """

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t = {time:.10g})")
        self.time = float(time)


class DomainExitError(TimedError):
    """A disc trajectory reached |z| >= 1 - 1e-12, or produced non-finite values."""


class ErrorBudgetExceeded(TimedError):
    """The Richardson local error estimate exceeded the requested budget."""


class ChartSingularityError(TimedError):
    """The projective chart coordinate w0 vanished."""


class TruncationLeakError(TimedError):
    """Weight leaked into the untrusted rows of a truncated basis."""


class TruncationError(GCSError):
    """A state could not be represented to the requested tail tolerance."""


class MobiusDegeneracyError(GCSError):
    """Denominator of a fractional-linear map is numerically zero."""
