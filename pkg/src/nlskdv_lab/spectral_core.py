"""Fourier-spectral representation of periodic functions on the 2π-torus.

Coefficients follow ``coeff(n) = (1/M) sum_j f(x_j) exp(-i n x_j)`` and are
stored in numpy FFT order (index ``j`` holds mode ``j`` for ``j <= M/2 - 1``
and mode ``j - M`` above the Nyquist slot).  The Nyquist coefficient is kept
identically zero.  Factors of 2π live in norms and integrals so that discrete
functionals converge to their continuum values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import SizeError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``M`` points on [0, 2π); active modes ``|n| <= M/2 - 1``."""

    M: int

    def __post_init__(self):
        if not isinstance(self.M, (int, np.integer)) or isinstance(self.M, bool):
            raise SizeError(f"grid size must be an integer, got {self.M!r}")
        if self.M < 8 or self.M % 2:
            raise SizeError(f"grid size must be even and >= 8, got {self.M}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def K(self) -> int:
        return self.M // 2 - 1

    @property
    def length(self) -> float:
        return TWO_PI

    @property
    def x(self) -> np.ndarray:
        return TWO_PI * np.arange(self.M) / self.M

    @property
    def n(self) -> np.ndarray:
        """Integer mode numbers in storage order (Nyquist slot reported as 0)."""
        return _modes(self.M)

    @property
    def modes(self) -> np.ndarray:
        """Active modes ``-K..K`` in ascending order."""
        return np.arange(-self.K, self.K + 1)


@lru_cache(maxsize=None)
def _modes(M: int) -> np.ndarray:
    n = np.fft.fftfreq(M, d=1.0 / M).round().astype(np.int64)
    n[M // 2] = 0
    n.setflags(write=False)
    return n


@lru_cache(maxsize=None)
def _neg_index(M: int) -> np.ndarray:
    """Storage index of mode ``-n`` for every storage slot."""
    idx = (-np.arange(M)) % M
    idx.setflags(write=False)
    return idx


def _pad(c: np.ndarray, P: int) -> np.ndarray:
    M = c.shape[-1]
    K = M // 2 - 1
    out = np.zeros(c.shape[:-1] + (P,), dtype=complex)
    out[..., : K + 1] = c[..., : K + 1]
    out[..., P - K:] = c[..., M - K:]
    return out


def _truncate(c: np.ndarray, M: int) -> np.ndarray:
    P = c.shape[-1]
    K = M // 2 - 1
    out = np.zeros(c.shape[:-1] + (M,), dtype=complex)
    out[..., : K + 1] = c[..., : K + 1]
    out[..., M - K:] = c[..., P - K:]
    return out


def to_padded_physical(c: np.ndarray, P: int) -> np.ndarray:
    """Samples of the trigonometric polynomial ``c`` on a ``P``-point grid."""
    return np.fft.ifft(_pad(c, P)) * P


def from_padded_physical(samples: np.ndarray, M: int) -> np.ndarray:
    """Coefficients ``|n| <= M/2-1`` of ``P`` samples (truncating the rest)."""
    P = samples.shape[-1]
    return _truncate(np.fft.fft(samples) / P, M)


def hermitian_part(c: np.ndarray) -> np.ndarray:
    """Project coefficients onto the real-valued (Hermitian) subspace."""
    sym = 0.5 * (c + np.conj(c[..., _neg_index(c.shape[-1])]))
    sym[..., 0] = sym[..., 0].real
    return sym


@dataclass(frozen=True, eq=False)
class SpectralField:
    """A periodic function stored as truncated Fourier coefficients.

    ``real`` marks fields constrained to be real-valued in physical space;
    such fields are kept exactly Hermitian-symmetric.
    """

    grid: Grid
    coeffs: np.ndarray
    real: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.M,):
            raise SizeError(f"expected {self.grid.M} coefficients, got shape {c.shape}")
        c[self.grid.M // 2] = 0.0
        if self.real:
            c = hermitian_part(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction helpers -------------------------------------------------
    @classmethod
    def zeros(cls, grid: Grid, real: bool = False) -> "SpectralField":
        return cls(grid, np.zeros(grid.M, dtype=complex), real)

    @classmethod
    def from_modes(cls, grid: Grid, modes: dict, real: bool = False) -> "SpectralField":
        """Build a field from ``{n: coefficient}``."""
        c = np.zeros(grid.M, dtype=complex)
        for n, a in modes.items():
            if abs(n) > grid.K:
                raise SizeError(f"mode {n} outside active range |n| <= {grid.K}")
            c[n % grid.M] += a
        return cls(grid, c, real)

    def coeff(self, n: int) -> complex:
        if abs(n) > self.grid.K:
            return 0j
        return complex(self.coeffs[n % self.grid.M])

    # algebra ---------------------------------------------------------------
    def _check(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise SizeError(f"grid mismatch: M={self.grid.M} vs M={other.grid.M}")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, self.real and other.real)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs, self.real)

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return dealiased_product([self, scalar])
        real = self.real and np.isreal(scalar)
        return SpectralField(self.grid, self.coeffs * scalar, bool(real))

    __rmul__ = __mul__

    def conj(self) -> "SpectralField":
        if self.real:
            return self
        return SpectralField(self.grid, np.conj(self.coeffs[_neg_index(self.grid.M)]))

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.real)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))


def _grid_of(samples_len: int, grid: Grid | None) -> Grid:
    if grid is None:
        return Grid(samples_len)
    if grid.M != samples_len:
        raise SizeError(f"expected {grid.M} samples, got {samples_len}")
    return grid


def forward_transform(samples: Sequence[complex], grid: Grid | None = None,
                      real: bool = False) -> SpectralField:
    """Physical samples ``f(x_j)`` -> spectral field (Nyquist dropped)."""
    s = np.asarray(samples)
    if s.ndim != 1:
        raise SizeError(f"samples must be one-dimensional, got shape {s.shape}")
    g = _grid_of(s.shape[0], grid)
    return SpectralField(g, np.fft.fft(s) / g.M, real)


def inverse_transform(f: SpectralField) -> np.ndarray:
    """Spectral field -> samples ``sum_n coeff(n) exp(i n x_j)``."""
    out = np.fft.ifft(f.coeffs) * f.grid.M
    return out.real if f.real else out


def derivative(f: SpectralField, order: int = 1) -> SpectralField:
    if order < 1 or int(order) != order:
        raise ValueError(f"derivative order must be a positive integer, got {order}")
    n = f.grid.n
    return f.with_coeffs(f.coeffs * (1j * n) ** int(order))


def dealiased_product(fs: Sequence[SpectralField]) -> SpectralField:
    """Pointwise product of two or three fields, truncated to ``|n| <= K``.

    Factors are zero-padded to ``P = 2M`` before multiplying, which makes the
    retained modes the exact truncated convolution for up to cubic products.
    """
    fs = list(fs)
    if not 2 <= len(fs) <= 3:
        raise SizeError(f"dealiased_product takes 2 or 3 factors, got {len(fs)}")
    grid = fs[0].grid
    for g in fs[1:]:
        if g.grid != grid:
            raise SizeError(f"grid mismatch: M={grid.M} vs M={g.grid.M}")
    P = 2 * grid.M
    prod = np.ones(P, dtype=complex)
    for g in fs:
        prod = prod * to_padded_physical(g.coeffs, P)
    real = all(g.real for g in fs)
    return SpectralField(grid, from_padded_physical(prod, grid.M), real)


def integral_of_product(fs: Sequence[SpectralField]) -> complex:
    """``∫ f1 f2 ... fq dx`` evaluated exactly for ``q <= 4`` factors."""
    fs = list(fs)
    if not 1 <= len(fs) <= 4:
        raise SizeError(f"integral_of_product takes 1 to 4 factors, got {len(fs)}")
    grid = fs[0].grid
    for g in fs[1:]:
        if g.grid != grid:
            raise SizeError(f"grid mismatch: M={grid.M} vs M={g.grid.M}")
    if len(fs) == 1:
        return integral(fs[0])
    if len(fs) == 2:
        a, b = fs
        # Parseval: only mode pairs (n, -n) contribute
        return complex(TWO_PI * np.sum(a.coeffs * b.coeffs[_neg_index(grid.M)]))
    P = 2 * grid.M
    prod = np.ones(P, dtype=complex)
    for g in fs:
        prod = prod * to_padded_physical(g.coeffs, P)
    return complex(TWO_PI * prod.mean())


def inner(f: SpectralField, g: SpectralField) -> complex:
    """``∫ f conj(g) dx``."""
    f._check(g)
    return complex(TWO_PI * np.vdot(g.coeffs, f.coeffs))


def sobolev_norm(f: SpectralField, s: float) -> float:
    """``(2π Σ <n>^{2s} |coeff(n)|^2)^{1/2}`` with ``<n> = 1 + |n|``."""
    w = (1.0 + np.abs(f.grid.n)) ** (2.0 * s)
    return float(np.sqrt(TWO_PI * np.sum(w * np.abs(f.coeffs) ** 2)))


def integral(f: SpectralField) -> complex:
    return complex(TWO_PI * f.coeffs[0])


def project_zero_mean(f: SpectralField) -> SpectralField:
    c = f.coeffs.copy()
    c[0] = 0.0
    return f.with_coeffs(c)
