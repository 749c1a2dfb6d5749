"""Mass, momentum and energy of the NLS-KdV system and their I-modified forms.

    M(u)   = ||u||_{L2}
    L(u,v) = alpha ||v||^2 + 2 gamma ∫ Im(u conj(u_x)) dx
    E(u,v) = alpha gamma ∫ v|u|^2 + gamma ||u_x||^2 + (alpha/2) ||v_x||^2
             - (alpha/6) ∫ v^3 + (beta gamma / 2) ∫ |u|^4

Every integral is evaluated exactly for the bandlimited fields (quartic
integrands are summed on the ``2M`` grid, which has no aliasing onto mode 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolation
from .i_operator import IOperatorSpec, apply_I
from .solver import SystemParams, SystemState
from .spectral_core import TWO_PI, SpectralField, integral_of_product, sobolev_norm


@dataclass(frozen=True)
class FunctionalReport:
    t: float
    mass: float
    momentum_L: float
    energy_E: float
    modified_L: float
    modified_E: float
    h1_norms: tuple

    def as_row(self) -> dict:
        return {"t": self.t, "mass": self.mass, "L": self.momentum_L, "E": self.energy_E,
                "IL": self.modified_L, "IE": self.modified_E,
                "u_H1": self.h1_norms[0], "v_H1": self.h1_norms[1]}


def mass(u: SpectralField) -> float:
    return sobolev_norm(u, 0.0)


def _l2sq(f: SpectralField) -> float:
    return float(TWO_PI * np.sum(np.abs(f.coeffs) ** 2))


def _dx_l2sq(f: SpectralField) -> float:
    return float(TWO_PI * np.sum(f.grid.n.astype(float) ** 2 * np.abs(f.coeffs) ** 2))


def _im_u_conj_ux(u: SpectralField) -> float:
    # ∫ u conj(i n u) = -i 2π Σ n |u_n|^2
    return float(-TWO_PI * np.sum(u.grid.n.astype(float) * np.abs(u.coeffs) ** 2))


def momentum_L(u: SpectralField, v: SpectralField, params: SystemParams) -> float:
    return params.alpha * _l2sq(v) + 2.0 * params.gamma * _im_u_conj_ux(u)


def energy_E_complex(u: SpectralField, v: SpectralField, params: SystemParams) -> complex:
    """Energy before discarding the (round-off) imaginary part."""
    a, b, g = params.alpha, params.beta, params.gamma
    uc = u.conj()
    e = a * g * integral_of_product([v, u, uc])
    e += g * _dx_l2sq(u) + 0.5 * a * _dx_l2sq(v)
    e -= a / 6.0 * integral_of_product([v, v, v])
    if b != 0:
        e += 0.5 * b * g * integral_of_product([u, uc, u, uc])
    return complex(e)


def energy_E(u: SpectralField, v: SpectralField, params: SystemParams) -> float:
    return energy_E_complex(u, v, params).real


def modified_functionals(u: SpectralField, v: SpectralField, spec: IOperatorSpec,
                         params: SystemParams) -> tuple[float, float]:
    """``(L(Iu, Iv), E(Iu, Iv))``."""
    Iu, Iv = apply_I(u, spec), apply_I(v, spec)
    return momentum_L(Iu, Iv, params), energy_E(Iu, Iv, params)


def report(state: SystemState, params: SystemParams, spec: IOperatorSpec | None = None) -> FunctionalReport:
    u, v = state.u, state.v
    L, E = momentum_L(u, v, params), energy_E(u, v, params)
    if spec is None:
        IL, IE = L, E
    else:
        IL, IE = modified_functionals(u, v, spec, params)
    return FunctionalReport(state.t, mass(u), L, E, IL, IE,
                            (sobolev_norm(u, 1.0), sobolev_norm(v, 1.0)))


def observer(params: SystemParams, spec: IOperatorSpec | None = None):
    """Observer callback for :func:`nlskdv_lab.solver.integrate`."""
    def obs(state: SystemState) -> dict:
        r = report(state, params, spec).as_row()
        r.pop("t")
        return r
    return obs


APRIORI_NAMES = ("e.L1", "e.L2", "e.E1", "e.E3", "e.E4", "e.E5")


def apriori_ratios(u: SpectralField, v: SpectralField, params: SystemParams) -> dict:
    """LHS/RHS of the six a-priori bounds relating (M, L, E) to Sobolev norms.

    The second energy bound is reported in its combined form (``e.E3``) whose
    right side uses ``||v||^{10/3}`` and ``M^{10}``; ``e.E2`` is included as
    an extra key since it shares the structure.
    """
    if not params.energy_coercive:
        raise HypothesisViolation(
            f"a-priori bounds require alpha*gamma > 0, got alpha={params.alpha}, gamma={params.gamma}")
    M = mass(u)
    L = abs(momentum_L(u, v, params))
    E = abs(energy_E(u, v, params))
    v2 = _l2sq(v)
    ux = np.sqrt(_dx_l2sq(u))
    ux2, vx2 = _dx_l2sq(u), _dx_l2sq(v)
    h1 = sobolev_norm(u, 1.0) ** 2 + sobolev_norm(v, 1.0) ** 2
    base = L ** (5.0 / 3.0) + M ** 8 + 1.0

    def ratio(lhs, rhs):
        return float(lhs / rhs) if rhs > 0 else (0.0 if lhs == 0 else float("inf"))

    return {
        "e.L1": ratio(L, v2 + M * ux),
        "e.L2": ratio(v2, L + M * ux),
        "e.E1": ratio(ux2 + vx2, E + base),
        "e.E2": ratio(E, ux2 + vx2 + base),
        "e.E3": ratio(E, ux2 + vx2 + v2 ** (5.0 / 3.0) + M ** 10 + 1.0),
        "e.E4": ratio(v2, L + M * np.sqrt(E) + M ** 6 + 1.0),
        "e.E5": ratio(h1, E + base),
    }
