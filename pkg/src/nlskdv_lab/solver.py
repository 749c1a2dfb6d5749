"""Time integration of the periodic NLS-KdV system

    i u_t + u_xx = alpha u v + beta |u|^2 u
    v_t + v_xxx + (1/2) (v^2)_x = gamma (|u|^2)_x

on the 2π-torus.  All nonlinear products are dealiased by zero padding to
``2M`` points, so the discrete system is the exact Galerkin truncation to
``|n| <= K``.  Three schemes are available:

* ``strang``: exact linear half-steps around a classical RK4 step of the
  nonlinear vector field;
* ``oracle_rk4``: classical RK4 on the full right-hand side (small steps only);
* ``lawson_rk4``: RK4 in the interaction picture, exact on the linear part.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, InstabilityError
from .spectral_core import (Grid, SpectralField, from_padded_physical, hermitian_part,
                            to_padded_physical)

log = logging.getLogger(__name__)

SCHEMES = ("strang", "oracle_rk4", "lawson_rk4")
# Classical RK4 is stable on the imaginary axis up to |lambda dt| = 2*sqrt(2).
RK4_IMAG_LIMIT = 2.0 * math.sqrt(2.0)
MAX_STEPS = 10 ** 8


@dataclass(frozen=True)
class SystemParams:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    @property
    def energy_coercive(self) -> bool:
        """True in the regime ``alpha * gamma > 0`` where M, L, E control H¹."""
        return self.alpha * self.gamma > 0

    @property
    def resonant(self) -> bool:
        return self.beta == 0


@dataclass(frozen=True)
class SystemState:
    t: float
    u: SpectralField
    v: SpectralField

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ConfigurationError("u and v must share a grid")
        if not self.v.real:
            raise ConfigurationError("v must be tagged real")
        if self.v.coeffs[0] != 0:
            raise ConfigurationError("v must have zero mean; use project_zero_mean first")

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @classmethod
    def from_arrays(cls, t: float, grid: Grid, u_hat: np.ndarray, v_hat: np.ndarray) -> "SystemState":
        v_hat = np.array(v_hat, dtype=complex)
        v_hat[0] = 0.0
        return cls(t, SpectralField(grid, u_hat), SpectralField(grid, v_hat, real=True))


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    scheme: str = "strang"
    dealias: bool = True

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigurationError(f"dt must be positive and finite, got {self.dt}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.dealias:
            raise ConfigurationError("dealiasing cannot be disabled")


class _Kernel:
    """Array-level evaluation of the vector field on one grid."""

    def __init__(self, grid: Grid, params: SystemParams):
        self.grid = grid
        self.params = params
        self.M = grid.M
        self.P = 2 * grid.M
        n = grid.n.astype(float)
        self.n = n
        self.ik = 1j * n
        self.lin_u = -1j * n ** 2       # u_t = i u_xx
        self.lin_v = 1j * n ** 3        # v_t = -v_xxx

    def nonlinear(self, u_hat, v_hat):
        a, b, g = self.params.alpha, self.params.beta, self.params.gamma
        up = to_padded_physical(u_hat, self.P)
        vp = to_padded_physical(v_hat, self.P).real
        mod2 = (up * up.conj()).real
        nu = a * up * vp
        if b != 0:
            nu = nu + b * mod2 * up
        du = -1j * from_padded_physical(nu, self.M)
        w = -0.5 * vp * vp + g * mod2
        dv = self.ik * from_padded_physical(w, self.M)
        dv[0] = 0.0
        return du, dv

    def full(self, u_hat, v_hat):
        du, dv = self.nonlinear(u_hat, v_hat)
        return du + self.lin_u * u_hat, dv + self.lin_v * v_hat

    def phases(self, dt):
        return np.exp(self.lin_u * dt), np.exp(self.lin_v * dt)


def rhs(state: SystemState, params: SystemParams) -> tuple[SpectralField, SpectralField]:
    """Time derivatives ``(u_t, v_t)`` of the full system."""
    k = _Kernel(state.grid, params)
    du, dv = k.full(state.u.coeffs, state.v.coeffs)
    return SpectralField(state.grid, du), SpectralField(state.grid, dv, real=True)


def linear_propagate(state: SystemState, dt: float) -> SystemState:
    """Exact free flow ``u -> exp(i dt ∂²) u``, ``v -> exp(-dt ∂³) v``."""
    n = state.grid.n.astype(float)
    u = state.u.coeffs * np.exp(-1j * n ** 2 * dt)
    v = state.v.coeffs * np.exp(1j * n ** 3 * dt)
    return SystemState.from_arrays(state.t + dt, state.grid, u, v)


def _rk4(f, y, dt):
    u, v = y
    k1u, k1v = f(u, v)
    k2u, k2v = f(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v)
    k3u, k3v = f(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v)
    k4u, k4v = f(u + dt * k3u, v + dt * k3v)
    return (u + dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u),
            v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v))


class Stepper:
    """Reusable single-grid stepper working on raw coefficient arrays."""

    def __init__(self, grid: Grid, params: SystemParams, config: SolverConfig):
        self.grid = grid
        self.params = params
        self.config = config
        self.kernel = _Kernel(grid, params)
        self.set_dt(config.dt)

    def set_dt(self, dt: float):
        if self.config.scheme == "oracle_rk4":
            check_oracle_stability(self.grid, dt)
        self.dt = dt
        k = self.kernel
        self._half = k.phases(0.5 * dt)
        self._full = k.phases(dt)

    def step(self, u, v):
        scheme = self.config.scheme
        dt = self.dt
        if scheme == "strang":
            hu, hv = self._half
            u, v = _rk4(self.kernel.nonlinear, (u * hu, v * hv), dt)
            u, v = u * hu, v * hv
        elif scheme == "oracle_rk4":
            u, v = _rk4(self.kernel.full, (u, v), dt)
        else:
            u, v = self._lawson(u, v, dt)
        v = hermitian_part(v)
        v[0] = 0.0
        return u, v

    def _lawson(self, u, v, dt):
        f = self.kernel.nonlinear
        hu, hv = self._half
        eu, ev = self._full
        k1u, k1v = f(u, v)
        k2u, k2v = f(hu * (u + 0.5 * dt * k1u), hv * (v + 0.5 * dt * k1v))
        k3u, k3v = f(hu * u + 0.5 * dt * k2u, hv * v + 0.5 * dt * k2v)
        k4u, k4v = f(eu * u + dt * hu * k3u, ev * v + dt * hv * k3v)
        un = eu * u + dt / 6.0 * (eu * k1u + 2 * hu * (k2u + k3u) + k4u)
        vn = ev * v + dt / 6.0 * (ev * k1v + 2 * hv * (k2v + k3v) + k4v)
        return un, vn


def check_oracle_stability(grid: Grid, dt: float):
    """Reject explicit RK4 steps outside its imaginary-axis stability interval."""
    stiff = dt * grid.K ** 3
    if stiff > RK4_IMAG_LIMIT:
        raise ConfigurationError(
            f"oracle_rk4 needs dt*K^3 <= {RK4_IMAG_LIMIT:.4f}; got {stiff:.4g} "
            f"(M={grid.M}, dt={dt})")


def _finite_or_raise(u, v, t):
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise InstabilityError(t)


def step_strang(state: SystemState, dt: float, params: SystemParams) -> SystemState:
    return _single_step(state, SolverConfig(dt, "strang"), params)


def step_oracle(state: SystemState, dt: float, params: SystemParams) -> SystemState:
    return _single_step(state, SolverConfig(dt, "oracle_rk4"), params)


def step(state: SystemState, config: SolverConfig, params: SystemParams) -> SystemState:
    return _single_step(state, config, params)


def _single_step(state, config, params):
    st = Stepper(state.grid, params, config)
    u, v = st.step(state.u.coeffs, state.v.coeffs)
    t = state.t + config.dt
    _finite_or_raise(u, v, t)
    return SystemState.from_arrays(t, state.grid, u, v)


Observer = Callable[[SystemState], dict]


@dataclass
class IntegrationResult:
    state: SystemState
    records: list = field(default_factory=list)
    steps: int = 0


def integrate(state: SystemState, T: float, config: SolverConfig, params: SystemParams,
              observers: Sequence[Observer] | None = None, stride: int = 1,
              exact_end: bool = True) -> IntegrationResult:
    """Advance ``state`` by ``T`` with uniform steps.

    The step count is ``ceil(T/dt)`` (to rounding); with ``exact_end`` the
    step is shrunk uniformly so the run lands on ``t0 + T``.  Observers are
    called on the initial state, every ``stride`` steps and on the final
    state; each returns a dict merged into one record per sample.
    """
    if not T > 0:
        raise ConfigurationError(f"integration time must be positive, got {T}")
    nsteps = max(1, int(math.ceil(T / config.dt - 1e-9)))
    if nsteps > MAX_STEPS:
        raise ConfigurationError(f"T/dt = {nsteps} exceeds the {MAX_STEPS} step limit")
    dt = T / nsteps if exact_end else config.dt
    stepper = Stepper(state.grid, params, config)
    if dt != config.dt:
        stepper.set_dt(dt)
    observers = list(observers or [])
    result = IntegrationResult(state)

    def observe(s):
        if observers:
            rec = {"t": s.t}
            for ob in observers:
                rec.update(ob(s))
            result.records.append(rec)

    observe(state)
    u, v = state.u.coeffs, state.v.coeffs
    t0 = state.t
    grid = state.grid
    for i in range(1, nsteps + 1):
        u, v = stepper.step(u, v)
        t = t0 + i * dt
        _finite_or_raise(u, v, t)
        if observers and (i % stride == 0 or i == nsteps):
            observe(SystemState.from_arrays(t, grid, u, v))
    final = SystemState.from_arrays(t0 + nsteps * dt, grid, u, v)
    result.state = final
    result.steps = nsteps
    log.debug("integrated %d steps of %s to t=%g", nsteps, config.scheme, final.t)
    return result


def sample_trajectory(state: SystemState, times: Iterable[float], config: SolverConfig,
                      params: SystemParams) -> dict:
    """States at each requested time (ascending, all >= state.t).

    Every gap between consecutive sample times is covered with a uniform
    step no larger than ``config.dt``.
    """
    out = {}
    cur = state
    for t in sorted(times):
        gap = t - cur.t
        if gap < -1e-15:
            raise ConfigurationError(f"sample time {t} precedes current time {cur.t}")
        if gap > 1e-15:
            cur = integrate(cur, gap, config, params).state
            cur = SystemState(t, cur.u, cur.v)
        out[t] = cur
    return out
