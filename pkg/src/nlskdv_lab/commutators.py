"""Commutator decompositions of d/dt L(Iu, Iv) and d/dt E(Iu, Iv).

Writing ``w = Iu`` and ``z = Iv``, the time derivatives of the modified
functionals along the flow are sums of integrals each containing one
commutator such as ``I(v v_x) - z z_x``.  All commutators vanish when ``I``
is the identity.

Every commutator is formed from dealiased products truncated to ``|n| <= K``
and then paired with the remaining factors by an exact integral.  Truncating
the commutator is what the Galerkin system does, so the identities hold to
round-off for the discrete flow.

The energy terms come in two readings.  ``derived`` (default) is the
expansion obtained by differentiating ``E(w, z)`` along the flow; ``verbatim``
reproduces the printed display, which differs from it in the signs of the
fifth and ninth terms.  ``e11_reading`` selects how the square in the
eleventh term is placed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InterpolationError
from .functionals import modified_functionals
from .i_operator import IOperatorSpec, apply_I
from .solver import SystemParams, SystemState
from .spectral_core import SpectralField, dealiased_product as prod, derivative as d, \
    integral_of_product as integ

READINGS = ("derived", "verbatim")
E11_READINGS = ("inner_square", "outer_square")


@dataclass(frozen=True)
class CommutatorBreakdown:
    t: float
    l_terms: tuple
    e_terms: tuple

    @property
    def l_sum(self) -> float:
        return float(sum(self.l_terms))

    @property
    def e_sum(self) -> float:
        return float(sum(self.e_terms))


class _Fields:
    """Shared intermediate quantities for one (u, v, I) evaluation."""

    def __init__(self, u: SpectralField, v: SpectralField, spec: IOperatorSpec):
        self.u, self.v = u, v
        self.spec = spec
        self.ub = u.conj()
        self.w = apply_I(u, spec)
        self.wb = self.w.conj()
        self.z = apply_I(v, spec)
        self.wx = d(self.w)
        self.wbx = d(self.wb)
        self.zx = d(self.z)
        self.zxx = d(self.z, 2)

    def I(self, f):
        return apply_I(f, self.spec)

    # commutators, truncated to |n| <= K
    def c_vvx(self):
        """I(v v_x) - z z_x"""
        return self.I(prod([self.v, d(self.v)])) - prod([self.z, self.zx])

    def c_abs2(self):
        """I(|u|^2) - |w|^2"""
        return self.I(prod([self.u, self.ub])) - prod([self.w, self.wb])

    def c_uv(self):
        """I(u v) - w z"""
        return self.I(prod([self.u, self.v])) - prod([self.w, self.z])

    def c_ubv(self):
        """I(conj(u) v) - conj(w) z"""
        return self.I(prod([self.ub, self.v])) - prod([self.wb, self.z])

    def c_cubic(self):
        """I(|u|^2 u) - w^2 conj(w)"""
        return self.I(prod([self.u, self.u, self.ub])) - prod([self.w, self.w, self.wb])

    def c_cubic_bar(self):
        """I(|u|^2 conj(u)) - w conj(w)^2"""
        return self.I(prod([self.u, self.ub, self.ub])) - prod([self.w, self.wb, self.wb])


def l_terms(u: SpectralField, v: SpectralField, spec: IOperatorSpec,
            params: SystemParams) -> tuple:
    """The four terms whose sum is d/dt L(Iu, Iv)."""
    a, b, g = params.alpha, params.beta, params.gamma
    F = _Fields(u, v, spec)
    L1 = 2 * a * integ([F.z, -F.c_vvx()]).real
    L2 = 2 * a * g * integ([F.z, d(F.c_abs2())]).real
    L3 = 4 * a * g * integ([F.wbx, -F.c_uv()]).real
    L4 = 4 * b * g * integ([-F.c_cubic(), F.wbx]).real if b != 0 else 0.0
    return (float(L1), float(L2), float(L3), float(L4))


def e_terms(u: SpectralField, v: SpectralField, spec: IOperatorSpec, params: SystemParams,
            reading: str = "derived", e11_reading: str = "inner_square") -> tuple:
    """The twelve terms whose sum is d/dt E(Iu, Iv), in display order."""
    if reading not in READINGS:
        raise ValueError(f"unknown reading {reading!r}; expected one of {READINGS}")
    if e11_reading not in E11_READINGS:
        raise ValueError(f"unknown E11 reading {e11_reading!r}; expected one of {E11_READINGS}")
    a, b, g = params.alpha, params.beta, params.gamma
    F = _Fields(u, v, spec)
    z, zx, zxx, w, wb, wx, wbx = F.z, F.zx, F.zxx, F.w, F.wb, F.wx, F.wbx
    cvv = F.c_vvx()
    cab = F.c_abs2()
    cubv = F.c_ubv()
    abs_w2 = prod([w, wb])
    flip = -1.0 if reading == "verbatim" else 1.0

    E1 = a * integ([cvv, zxx]).real
    E2 = 0.5 * a * integ([prod([z, z]), cvv]).real
    E4 = -a * g * integ([abs_w2, cvv]).real
    # derived: alpha gamma ∫ (I|u|^2 - |w|^2) z z_x ; printed with the opposite sign
    E5 = flip * a * g * integ([cab, prod([z, zx])]).real
    E6 = -a * g * integ([zxx, d(cab)]).real
    E7 = -2 * a * g * integ([wx, d(cubv)]).imag
    E8 = a * g * g * integ([d(cab), abs_w2]).real
    # derived: -2 alpha^2 gamma Im ∫ z w (I(conj(u) v) - conj(w) z) ; printed with +
    E9 = -flip * 2 * a * a * g * integ([prod([z, w]), cubv]).imag
    if b != 0:
        ccub = F.c_cubic()
        E3 = 2 * b * g * integ([d(ccub), wbx]).imag
        E10 = 2 * b * b * g * integ([prod([w, wb, wb]), ccub]).imag
        if e11_reading == "inner_square":
            E11 = -2 * a * b * g * integ([prod([z, w]), F.c_cubic_bar()]).imag
        else:
            # Iv Iu (I(|u|^2 conj u) - Iu conj(Iu))^2, the literal outer square
            inner = F.I(prod([F.u, F.ub, F.ub])) - abs_w2
            E11 = -2 * a * b * g * integ([z, w, inner, inner]).imag
        E12 = -2 * a * b * g * integ([prod([w, w, wb]), cubv]).imag
    else:
        E3 = E10 = E11 = E12 = 0.0
    terms = (E1, E2, E3, E4, E5, E6, E7, E8, E9, E10, E11, E12)
    return tuple(float(x) for x in terms)


def breakdown(state: SystemState, spec: IOperatorSpec, params: SystemParams,
              reading: str = "derived", e11_reading: str = "inner_square") -> CommutatorBreakdown:
    return CommutatorBreakdown(state.t, l_terms(state.u, state.v, spec, params),
                               e_terms(state.u, state.v, spec, params, reading, e11_reading))


def _lookup(trajectory: Mapping[float, SystemState], t: float, tol: float = 1e-12) -> SystemState:
    for key, st in trajectory.items():
        if abs(key - t) <= tol * max(1.0, abs(t)):
            return st
    raise InterpolationError(f"trajectory has no sample at t={t!r}")


def derivative_identity_residual(trajectory: Mapping[float, SystemState], t: float, h: float,
                                 spec: IOperatorSpec, params: SystemParams,
                                 reading: str = "derived",
                                 e11_reading: str = "inner_square") -> tuple[float, float]:
    """Normalized mismatch between centered differences and the term sums.

    ``trajectory`` maps sample times to states and must contain ``t - h``,
    ``t`` and ``t + h``.
    """
    lo, mid, hi = (_lookup(trajectory, x) for x in (t - h, t, t + h))
    L_lo, E_lo = modified_functionals(lo.u, lo.v, spec, params)
    L_hi, E_hi = modified_functionals(hi.u, hi.v, spec, params)
    b = breakdown(mid, spec, params, reading, e11_reading)
    dL = (L_hi - L_lo) / (2 * h)
    dE = (E_hi - E_lo) / (2 * h)
    res_L = abs(dL - b.l_sum) / max(1.0, abs(b.l_sum))
    res_E = abs(dE - b.e_sum) / max(1.0, abs(b.e_sum))
    return float(res_L), float(res_E)
