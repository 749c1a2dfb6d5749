import numpy as np
import pytest

from nlskdv_lab.commutators import breakdown, derivative_identity_residual, e_terms, l_terms
from nlskdv_lab.errors import InterpolationError
from nlskdv_lab.i_operator import IOperatorSpec
from nlskdv_lab.initial_data import smooth_random_state
from nlskdv_lab.solver import SolverConfig, SystemParams, sample_trajectory
from nlskdv_lab.spectral_core import Grid

G = Grid(16)
SPEC = IOperatorSpec.from_regularity(4, 0.5)
T0 = 0.01
HS = (1e-3, 5e-4, 2.5e-4)


def trajectory(params, seed=7):
    s0 = smooth_random_state(G, seed, amplitude=1.0, decay=0.5)
    times = sorted({T0} | {T0 + h for h in HS} | {T0 - h for h in HS})
    return sample_trajectory(s0, times, SolverConfig(2.5e-5, "lawson_rk4"), params)


@pytest.mark.parametrize("beta", [0.0, 1.0])
def test_residuals_decay_at_second_order(beta):
    p = SystemParams(1.0, beta, 1.0)
    tr = trajectory(p)
    res = np.array([derivative_identity_residual(tr, T0, h, SPEC, p) for h in HS])
    for col in range(2):
        order = np.polyfit(np.log(HS), np.log(res[:, col]), 1)[0]
        assert order >= 1.8


def test_printed_signs_do_not_match_the_flow():
    p = SystemParams()
    tr = trajectory(p)
    res = [derivative_identity_residual(tr, T0, h, SPEC, p, reading="verbatim")[1] for h in HS]
    # a wrong identity leaves an h-independent mismatch
    assert min(res) > 1e-3
    assert res[-1] > 0.5 * res[0]


def test_outer_square_reading_is_inconsistent():
    p = SystemParams()
    tr = trajectory(p)
    inner = derivative_identity_residual(tr, T0, HS[-1], SPEC, p, e11_reading="inner_square")[1]
    outer = derivative_identity_residual(tr, T0, HS[-1], SPEC, p, e11_reading="outer_square")[1]
    assert outer > 10 * inner


@pytest.mark.parametrize("spec", [IOperatorSpec.from_regularity(G.K, 0.5), IOperatorSpec.from_regularity(4, 1.0)])
def test_terms_vanish_for_identity_multiplier(spec):
    s = smooth_random_state(G, 3, amplitude=1.0)
    p = SystemParams()
    b = breakdown(s, spec, p)
    assert max(abs(x) for x in b.l_terms + b.e_terms) == 0.0


def test_term_counts_and_resonant_zeros():
    s = smooth_random_state(G, 3)
    assert len(l_terms(s.u, s.v, SPEC, SystemParams())) == 4
    e = e_terms(s.u, s.v, SPEC, SystemParams(1.0, 0.0, 1.0))
    assert len(e) == 12
    assert e[2] == e[9] == e[10] == e[11] == 0.0
    assert l_terms(s.u, s.v, SPEC, SystemParams(1.0, 0.0, 1.0))[3] == 0.0


def test_unknown_readings():
    s = smooth_random_state(G, 3)
    with pytest.raises(ValueError):
        e_terms(s.u, s.v, SPEC, SystemParams(), reading="other")
    with pytest.raises(ValueError):
        e_terms(s.u, s.v, SPEC, SystemParams(), e11_reading="other")


def test_missing_sample_time():
    p = SystemParams()
    tr = trajectory(p)
    with pytest.raises(InterpolationError):
        derivative_identity_residual(tr, T0, 3e-4, SPEC, p)
