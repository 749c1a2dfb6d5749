"""The smoothing Fourier multiplier ``I_N^alpha`` and its symbol ``m``.

``m(xi) = 1`` for ``|xi| <= 1`` and ``|xi|^-1`` for ``|xi| >= 2``.  On the
transition band the default ``smooth`` variant is the C¹ blend
``m = |xi|^(-h(log|xi|))`` where ``h`` is the cubic Hermite ramp on
``[0, log 2]`` with zero end slopes; ``sharp`` uses ``min(1, |xi|^-1)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .spectral_core import SpectralField

LOG2 = np.log(2.0)
VARIANTS = ("smooth", "sharp")


@dataclass(frozen=True)
class IOperatorSpec:
    """Parameters of ``I_N^alpha``; the I-method uses ``alpha = 1 - s``."""

    N: float
    alpha: float
    variant: str = "smooth"

    def __post_init__(self):
        if not np.isfinite(self.N) or self.N < 1:
            raise ConfigurationError(f"I-operator needs N >= 1, got {self.N}")
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown symbol variant {self.variant!r}; expected one of {VARIANTS}")
        if self.alpha < 0:
            warnings.warn(f"negative I-operator exponent alpha={self.alpha} (roughening multiplier)",
                          stacklevel=2)

    @classmethod
    def from_regularity(cls, N: float, s: float, variant: str = "smooth") -> "IOperatorSpec":
        return cls(N=float(N), alpha=1.0 - float(s), variant=variant)

    @property
    def is_identity_exponent(self) -> bool:
        return self.alpha == 0


def symbol_m(xi, variant: str = "smooth"):
    """Evaluate the even, nonincreasing symbol ``m`` (scalar or array)."""
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown symbol variant {variant!r}; expected one of {VARIANTS}")
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.ones_like(a)
    hi = a >= 2.0
    out[hi] = 1.0 / a[hi]
    band = (a > 1.0) & ~hi
    if variant == "sharp":
        out[band] = 1.0 / a[band]
    else:
        y = np.log(a[band])
        r = y / LOG2
        h = r * r * (3.0 - 2.0 * r)
        out[band] = np.exp(-h * y)
    return float(out) if out.ndim == 0 else out


def multiplier(n, spec: IOperatorSpec) -> np.ndarray:
    """``m(n/N)^alpha`` on an array of integer modes."""
    if spec.alpha == 0:
        return np.ones(np.shape(n))
    return symbol_m(np.asarray(n, dtype=float) / spec.N, spec.variant) ** spec.alpha


def apply_I(f: SpectralField, spec: IOperatorSpec) -> SpectralField:
    """Apply ``I_N^alpha``; realness and the zero mode are preserved."""
    return f.with_coeffs(f.coeffs * multiplier(f.grid.n, spec))


def is_identity_on(grid_K: int, spec: IOperatorSpec) -> bool:
    """True when the multiplier is exactly 1 on every active mode."""
    return spec.alpha == 0 or grid_K <= spec.N
