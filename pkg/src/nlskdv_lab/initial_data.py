"""Reproducible initial data for experiments."""

from __future__ import annotations

import numpy as np

from .solver import SystemState
from .spectral_core import Grid, SpectralField, sobolev_norm


def _random_coeffs(grid: Grid, rng: np.random.Generator, envelope: np.ndarray) -> np.ndarray:
    c = envelope * (rng.standard_normal(grid.M) + 1j * rng.standard_normal(grid.M)) / np.sqrt(2.0)
    c[grid.M // 2] = 0.0
    return c


def smooth_random_state(grid: Grid, seed: int, amplitude: float = 0.5, decay: float = 0.5,
                        t: float = 0.0) -> SystemState:
    """Analytic-type data: coefficients of size ``amplitude * exp(-decay |n|)``."""
    rng = np.random.default_rng(seed)
    env = amplitude * np.exp(-decay * np.abs(grid.n))
    u = _random_coeffs(grid, rng, env)
    v = _random_coeffs(grid, rng, env)
    return SystemState.from_arrays(t, grid, u, v)


def power_law_state(grid: Grid, seed: int, s: float, eps: float = 0.1, norm: float = 1.0,
                    t: float = 0.0) -> SystemState:
    """Rough data with ``|coeff(n)| ~ <n>^{-(s + 1/2 + eps)}``, rescaled so
    that ``||u||_{H^s} = ||v||_{H^s} = norm``."""
    rng = np.random.default_rng(seed)
    env = (1.0 + np.abs(grid.n)) ** (-(s + 0.5 + eps))
    phases_u = np.exp(2j * np.pi * rng.random(grid.M))
    phases_v = np.exp(2j * np.pi * rng.random(grid.M))
    u = SpectralField(grid, env * phases_u)
    vc = env * phases_v
    vc[0] = 0.0
    v = SpectralField(grid, vc, real=True)
    u = u * (norm / sobolev_norm(u, s))
    v = v * (norm / sobolev_norm(v, s))
    return SystemState.from_arrays(t, grid, u.coeffs, v.coeffs)


def plane_wave_state(grid: Grid, k: int = 1, amplitude: complex = 1.0) -> SystemState:
    """``u = amplitude * exp(i k x)``, ``v = 0``."""
    u = SpectralField.from_modes(grid, {k: amplitude})
    return SystemState.from_arrays(0.0, grid, u.coeffs, np.zeros(grid.M))


def plane_wave_exact(grid: Grid, t: float, k: int = 1, amplitude: complex = 1.0,
                     alpha: float = 1.0, beta: float = 0.0) -> SystemState:
    """Exact solution from :func:`plane_wave_state`: ``u = A exp(i(kx - (k^2 + beta|A|^2) t))``."""
    phase = np.exp(-1j * (k * k + beta * abs(amplitude) ** 2) * t)
    u = SpectralField.from_modes(grid, {k: amplitude * phase})
    return SystemState.from_arrays(t, grid, u.coeffs, np.zeros(grid.M))
