"""Exception and warning types shared across the package."""


class HyperwaveError(Exception):
    """Base class for all library errors."""


class ConfigError(HyperwaveError):
    """Invalid experiment configuration or operation arguments."""


class RangeError(HyperwaveError):
    """Argument outside the numerically supported range (overflow etc.)."""


class PoleError(HyperwaveError):
    """Special-function evaluation requested at a pole."""


class TruncationError(HyperwaveError):
    """A profile does not decay before its grid end, so the quadrature
    would silently drop mass."""


class CalibrationError(HyperwaveError):
    """Normalization calibration did not close (round-trip residual too big)."""


class StepControlError(HyperwaveError):
    """Adaptive integration failed to reach the requested tolerance."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class DivergenceWarning(UserWarning):
    """Spectral tail carries a non-negligible share of an integral."""


class AliasingWarning(UserWarning):
    """Temporal spectrum has significant mass in the top octave."""
