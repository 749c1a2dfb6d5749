"""Local step-size law, the global continuation loop and exact threshold arithmetic.

Each continuation leg has length ``delta = min(1, c * proxy^(-p - eps))``
where ``proxy = ||Iu||_{H1} + ||Iv||_{H1}`` at the start of the leg and
``p = 16/3`` (``beta != 0``) or ``8`` (``beta = 0``).

The regularity thresholds come from requiring, with ``x = 1 - s`` and
``delta ~ N^(-p x)``, that every increment bound times the number of legs
``T/delta`` stays below the size of the modified functional::

    N^a * delta^e * N^(r x) * delta^-1  <  N^(w x)
    <=>  a + (1 - e) p x + r x < w x

which is linear in ``x`` and solved exactly over the rationals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, HypothesisViolation, InstabilityError
from .functionals import mass, modified_functionals
from .i_operator import IOperatorSpec, apply_I
from .solver import SolverConfig, SystemParams, SystemState, integrate
from .spectral_core import SpectralField, project_zero_mean, sobolev_norm

log = logging.getLogger(__name__)

P_NONRESONANT = Fraction(16, 3)
P_RESONANT = Fraction(8)
BRANCHES = {"nonresonant": P_NONRESONANT, "resonant": P_RESONANT}


@dataclass(frozen=True)
class ContinuationConfig:
    s: Fraction
    N: float
    T_goal: float
    c_delta: float = 1.0
    eps: float = 0.0
    beta_zero: bool | None = None  # None: decide from SystemParams.beta

    def __post_init__(self):
        s = Fraction(self.s).limit_denominator(10 ** 6) if not isinstance(self.s, Fraction) else self.s
        object.__setattr__(self, "s", s)
        if not Fraction(1, 3) <= s <= 1:
            raise ConfigurationError(f"continuation requires 1/3 <= s <= 1, got s={s}")
        if self.c_delta <= 0:
            raise ConfigurationError(f"c_delta must be positive, got {self.c_delta}")
        if self.eps < 0:
            raise ConfigurationError(f"eps must be nonnegative, got {self.eps}")
        if not self.T_goal > 0:
            raise ConfigurationError(f"T_goal must be positive, got {self.T_goal}")
        if self.N < 1:
            raise ConfigurationError(f"N must be >= 1, got {self.N}")

    @property
    def i_spec(self) -> IOperatorSpec:
        return IOperatorSpec.from_regularity(self.N, float(self.s))

    def resonant(self, params: SystemParams) -> bool:
        return params.beta == 0 if self.beta_zero is None else bool(self.beta_zero)


def delta_exponent(resonant: bool) -> Fraction:
    return P_RESONANT if resonant else P_NONRESONANT


def norm_proxy(u: SpectralField, v: SpectralField, spec: IOperatorSpec) -> float:
    """``||Iu||_{H1} + ||Iv||_{H1}``, the time-slice surrogate for the data norm."""
    return sobolev_norm(apply_I(u, spec), 1.0) + sobolev_norm(apply_I(v, spec), 1.0)


def delta_from_proxy(proxy: float, p: float, c_delta: float = 1.0, eps: float = 0.0) -> float:
    if proxy <= 0:
        return 1.0
    return float(min(1.0, c_delta * proxy ** (-(float(p) + eps))))


def local_delta(u: SpectralField, v: SpectralField, config: ContinuationConfig,
                params: SystemParams) -> float:
    p = delta_exponent(config.resonant(params))
    return delta_from_proxy(norm_proxy(u, v, config.i_spec), p, config.c_delta, config.eps)


@dataclass
class Leg:
    index: int
    t_start: float
    delta: float
    proxy: float
    mass: float
    IL_start: float
    IE_start: float
    IL_end: float
    IE_end: float

    @property
    def dIL(self) -> float:
        return self.IL_end - self.IL_start

    @property
    def dIE(self) -> float:
        return self.IE_end - self.IE_start


@dataclass
class ContinuationReport:
    legs: list = field(default_factory=list)
    final_state: SystemState | None = None
    budget_L: float = 0.0
    budget_E: float = 0.0
    cumulative_dIL: float = 0.0
    cumulative_dIE: float = 0.0
    breach_leg: int | None = None
    breach_quantity: str | None = None
    instability: InstabilityError | None = None

    @property
    def leg_count(self) -> int:
        return len(self.legs)

    @property
    def total_time(self) -> float:
        return float(math.fsum(l.delta for l in self.legs))

    @property
    def usage_L(self) -> float:
        return self.cumulative_dIL / self.budget_L

    @property
    def usage_E(self) -> float:
        return self.cumulative_dIE / self.budget_E

    def rows(self) -> list:
        out = []
        cl = ce = 0.0
        for l in self.legs:
            cl += abs(l.dIL)
            ce += abs(l.dIE)
            out.append({"leg": l.index, "t_start": l.t_start, "delta": l.delta, "proxy": l.proxy,
                        "mass": l.mass, "IL": l.IL_end, "IE": l.IE_end, "dIL": l.dIL, "dIE": l.dIE,
                        "usage_L": cl / self.budget_L, "usage_E": ce / self.budget_E})
        return out


def continuation_run(u0: SpectralField, v0: SpectralField, config: ContinuationConfig,
                     params: SystemParams, solver_config: SolverConfig,
                     max_legs: int = 100000) -> ContinuationReport:
    """Iterate the local step until ``T_goal``, tracking the modified functionals.

    Budget usage compares the accumulated ``|Δ L(Iu,Iv)|`` and ``|Δ E(Iu,Iv)|``
    against ``N^(1-s)`` and ``N^(2(1-s))``; a breach is recorded (first leg
    index) but does not stop the run.  An instability stops the run and is
    stored on the report instead of propagating.
    """
    if not params.energy_coercive:
        raise HypothesisViolation("continuation requires alpha*gamma > 0")
    spec = config.i_spec
    x = 1.0 - float(config.s)
    rep = ContinuationReport(budget_L=config.N ** x, budget_E=config.N ** (2 * x))
    v0 = project_zero_mean(SpectralField(v0.grid, v0.coeffs, real=True))
    state = SystemState(0.0, u0, v0)
    IL, IE = modified_functionals(state.u, state.v, spec, params)
    t = 0.0
    T = float(config.T_goal)
    while T - t > 1e-12 * max(1.0, T):
        if len(rep.legs) >= max_legs:
            raise ConfigurationError(f"continuation exceeded {max_legs} legs before T_goal={T}")
        proxy = norm_proxy(state.u, state.v, spec)
        delta = local_delta(state.u, state.v, config, params)
        delta = min(delta, T - t)
        try:
            nxt = integrate(state, delta, solver_config, params).state
        except InstabilityError as exc:
            rep.instability = exc
            log.warning("instability in leg %d at t=%g", len(rep.legs), exc.t)
            break
        IL2, IE2 = modified_functionals(nxt.u, nxt.v, spec, params)
        leg = Leg(len(rep.legs), t, delta, proxy, mass(state.u), IL, IE, IL2, IE2)
        rep.legs.append(leg)
        rep.cumulative_dIL += abs(leg.dIL)
        rep.cumulative_dIE += abs(leg.dIE)
        if rep.breach_leg is None:
            if rep.usage_L > 1.0:
                rep.breach_leg, rep.breach_quantity = leg.index, "L"
            elif rep.usage_E > 1.0:
                rep.breach_leg, rep.breach_quantity = leg.index, "E"
        t = t + delta if T - (t + delta) > 1e-12 * max(1.0, T) else T
        state = SystemState(t, nxt.u, nxt.v)
        IL, IE = IL2, IE2
    rep.final_state = state
    return rep


# --------------------------------------------------------------------------
# exact threshold arithmetic


@dataclass(frozen=True)
class Inequality:
    """``N^a delta^e N^(r x) (T/delta) < N^(w x)`` with ``x = 1 - s``.

    ``printed_q`` is the coefficient multiplying ``p_delta`` as displayed in
    the source bullet list; ``q = 1 - e`` is what the delta power implies.
    """

    name: str
    functional: str
    a: Fraction
    e: Fraction
    r: int
    w: int
    printed_q: Fraction

    @property
    def q(self) -> Fraction:
        return 1 - self.e

    @property
    def printed_q_consistent(self) -> bool:
        return self.printed_q == self.q

    def threshold(self, p_delta: Fraction) -> Fraction | None:
        """Smallest admissible ``s`` (strict), or None when every ``s`` works."""
        slope = self.q * p_delta + self.r - self.w
        if slope <= 0:
            return None
        return 1 + self.a / slope

    def pattern(self, p_delta: Fraction) -> str:
        return f"{self.a} + ({self.q})({p_delta})(1-s) + {self.r}(1-s) < {self.w}(1-s)"


F = Fraction
INEQUALITIES = (
    Inequality("L.1", "L", F(-1), F(19, 24), 3, 1, F(5, 24)),
    Inequality("L.2", "L", F(-2), F(1, 2), 4, 1, F(1, 2)),
    Inequality("E.1", "E", F(-1), F(1, 6), 3, 2, F(5, 6)),
    Inequality("E.2", "E", F(-2, 3), F(3, 8), 3, 2, F(5, 6)),
    Inequality("E.3", "E", F(-3, 2), F(1, 8), 3, 2, F(7, 8)),
    Inequality("E.4", "E", F(-1), F(1, 2), 4, 2, F(1, 2)),
    Inequality("E.5", "E", F(-2), F(1, 2), 6, 2, F(1, 2)),
)
del F

# thresholds as printed, nonresonant then resonant
PRINTED_THRESHOLDS = {
    "nonresonant": (Fraction(19, 28), Fraction(11, 17), Fraction(40, 49), Fraction(11, 13),
                    Fraction(25, 34), Fraction(11, 14), Fraction(7, 10)),
    "resonant": (Fraction(8, 11), Fraction(5, 7), Fraction(20, 23), Fraction(8, 9),
                 Fraction(13, 16), Fraction(5, 6), Fraction(3, 4)),
}


@dataclass(frozen=True)
class ThresholdReport:
    p_delta: Fraction
    thresholds: dict
    binding: Fraction | None
    binding_name: str | None
    provenance: dict

    def rows(self) -> list:
        rows = [{"inequality": k, "threshold": "" if v is None else str(v)} for k, v in self.thresholds.items()]
        rows.append({"inequality": "binding", "threshold": "" if self.binding is None else str(self.binding)})
        return rows


def solve_thresholds(p_delta) -> ThresholdReport:
    """Thresholds for an arbitrary positive rational ``p_delta``.

    An inequality whose ``(1 - s)`` coefficient is not positive holds for
    every ``s`` and is reported as ``None``; for small ``p_delta`` a
    threshold may also be negative, meaning no restriction on ``s >= 0``.
    """
    p = Fraction(p_delta)
    if p <= 0:
        raise ValueError(f"p_delta must be positive, got {p}")
    th, prov = {}, {}
    for ineq in INEQUALITIES:
        th[ineq.name] = ineq.threshold(p)
        prov[ineq.name] = {
            "pattern": ineq.pattern(p),
            "delta_power": str(ineq.e),
            "printed_q": str(ineq.printed_q),
            "printed_q_consistent": ineq.printed_q_consistent,
        }
    active = {k: v for k, v in th.items() if v is not None}
    if not active:
        return ThresholdReport(p, th, None, None, prov)
    name = max(active, key=lambda k: active[k])
    return ThresholdReport(p, th, active[name], name, prov)


def gwp_threshold(p_delta, branch: str | None = None) -> ThresholdReport:
    """Thresholds for the admissible delta exponents 16/3 and 8.

    ``branch`` may be given instead of (or to cross-check) ``p_delta``.
    """
    if branch is not None:
        if branch not in BRANCHES:
            raise ConfigurationError(f"unknown branch {branch!r}; expected one of {tuple(BRANCHES)}")
        if p_delta is None:
            p_delta = BRANCHES[branch]
        elif Fraction(p_delta) != BRANCHES[branch]:
            raise ConfigurationError(f"p_delta={p_delta} does not match branch {branch!r}")
    p = Fraction(p_delta)
    if p not in BRANCHES.values():
        raise ValueError(f"p_delta must be 16/3 or 8, got {p}")
    return solve_thresholds(p)
