"""Numerical laboratory for the periodic NLS-KdV system and its I-method bookkeeping."""

from .errors import (ConfigurationError, HypothesisViolation, InstabilityError, InterpolationError,
                     LabError, SizeError)
from .i_operator import IOperatorSpec, apply_I
from .solver import SolverConfig, SystemParams, SystemState, integrate
from .spectral_core import Grid, SpectralField

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "Grid", "HypothesisViolation", "IOperatorSpec", "InstabilityError",
    "InterpolationError", "LabError", "SizeError", "SolverConfig", "SpectralField", "SystemParams",
    "SystemState", "apply_I", "integrate", "__version__",
]
