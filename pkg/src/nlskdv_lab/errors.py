"""Exception types shared across the lab."""


class LabError(Exception):
    """Base class for all errors raised by nlskdv_lab."""


class SizeError(LabError, ValueError):
    """Array length or grid mismatch."""


class ConfigurationError(LabError, ValueError):
    """Invalid or incomplete configuration."""


class HypothesisViolation(LabError, ValueError):
    """Inputs fall outside the hypotheses of an estimate or functional bound."""


class InstabilityError(LabError, ArithmeticError):
    """A time step produced non-finite coefficients."""

    def __init__(self, t: float, message: str = ""):
        self.t = float(t)
        super().__init__(message or f"non-finite coefficients produced at t={self.t!r}")


class InterpolationError(LabError, KeyError):
    """A stored trajectory lacks a requested sample time."""
