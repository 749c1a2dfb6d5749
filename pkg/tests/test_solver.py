import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlskdv_lab.errors import ConfigurationError, InstabilityError
from nlskdv_lab.functionals import energy_E, mass, momentum_L
from nlskdv_lab.initial_data import plane_wave_exact, plane_wave_state, smooth_random_state
from nlskdv_lab.solver import (RK4_IMAG_LIMIT, SolverConfig, SystemParams, SystemState,
                               check_oracle_stability, integrate, linear_propagate, rhs,
                               sample_trajectory, step, step_oracle, step_strang)
from nlskdv_lab.spectral_core import Grid, SpectralField, integral

RESONANT = SystemParams(1.0, 0.0, 1.0)


def coeff_error(a: SystemState, b: SystemState) -> float:
    return float(np.max(np.abs(np.r_[a.u.coeffs - b.u.coeffs, a.v.coeffs - b.v.coeffs])))


def fitted_order(dts, errs) -> float:
    return float(np.polyfit(np.log(dts), np.log(errs), 1)[0])


class TestConfig:
    def test_rejects_bad_dt_and_scheme(self):
        with pytest.raises(ConfigurationError):
            SolverConfig(0.0)
        with pytest.raises(ConfigurationError):
            SolverConfig(float("nan"))
        with pytest.raises(ConfigurationError):
            SolverConfig(1e-3, "euler")
        with pytest.raises(ConfigurationError):
            SolverConfig(1e-3, dealias=False)

    def test_state_requires_zero_mean_real_v(self):
        g = Grid(8)
        with pytest.raises(ConfigurationError):
            SystemState(0.0, SpectralField.zeros(g), SpectralField.zeros(g))
        v = SpectralField.from_modes(g, {0: 1.0}, real=True)
        with pytest.raises(ConfigurationError):
            SystemState(0.0, SpectralField.zeros(g), v)

    def test_from_arrays_projects_mean(self):
        g = Grid(8)
        s = SystemState.from_arrays(0.0, g, np.zeros(8), np.ones(8))
        assert integral(s.v) == 0

    def test_oracle_stability_guard(self):
        g = Grid(32)
        check_oracle_stability(g, RK4_IMAG_LIMIT / 15 ** 3)
        with pytest.raises(ConfigurationError, match="dt\\*K\\^3"):
            check_oracle_stability(g, 1e-3)
        with pytest.raises(ConfigurationError):
            integrate(smooth_random_state(g, 0), 0.1, SolverConfig(1e-3, "oracle_rk4"), RESONANT)


class TestExactSolutions:
    def test_linear_propagation(self):
        g = Grid(16)
        s = SystemState.from_arrays(0.0, g, SpectralField.from_modes(g, {2: 1.0}).coeffs,
                                    SpectralField.from_modes(g, {1: 0.5, -1: 0.5}, real=True).coeffs)
        out = linear_propagate(s, 0.3)
        assert out.u.coeff(2) == pytest.approx(np.exp(-4j * 0.3), abs=1e-15)
        assert out.v.coeff(1) == pytest.approx(0.5 * np.exp(0.3j), abs=1e-15)
        assert out.t == 0.3

    def test_rhs_of_plane_wave(self):
        g = Grid(8)
        du, dv = rhs(plane_wave_state(g, 2, 0.5), SystemParams(1.0, 2.0, 1.0))
        # u_t = -i (k^2 + beta |A|^2) u
        assert du.coeff(2) == pytest.approx(-1j * (4 + 2 * 0.25) * 0.5, abs=1e-14)
        assert np.max(np.abs(dv.coeffs)) < 1e-15

    @pytest.mark.parametrize("scheme", ["strang", "lawson_rk4"])
    def test_splitting_schemes_exact_on_resonant_plane_wave(self, scheme):
        g = Grid(8)
        out = integrate(plane_wave_state(g), 1.0, SolverConfig(0.1, scheme), RESONANT).state
        assert coeff_error(out, plane_wave_exact(g, 1.0)) < 1e-14

    def test_oracle_fourth_order_on_plane_wave(self):
        g = Grid(8)
        dts = [0.04, 0.02, 0.01]
        errs = [coeff_error(integrate(plane_wave_state(g), 1.0, SolverConfig(dt, "oracle_rk4"), RESONANT).state,
                            plane_wave_exact(g, 1.0)) for dt in dts]
        assert fitted_order(dts, errs) == pytest.approx(4.0, abs=0.2)

    def test_nonresonant_plane_wave_phase(self):
        g = Grid(8)
        p = SystemParams(1.0, 1.0, 1.0)
        out = integrate(plane_wave_state(g, 1, 0.7), 0.5, SolverConfig(1e-3, "lawson_rk4"), p).state
        ex = plane_wave_exact(g, 0.5, 1, 0.7, beta=1.0)
        assert coeff_error(out, ex) < 1e-12


class TestOrders:
    def test_strang_second_order(self):
        g = Grid(16)
        p = SystemParams()
        s0 = smooth_random_state(g, 11)
        ref = integrate(s0, 0.2, SolverConfig(1e-4, "oracle_rk4"), p).state
        dts = [0.004, 0.002, 0.001]
        errs = [coeff_error(integrate(s0, 0.2, SolverConfig(dt, "strang"), p).state, ref) for dt in dts]
        assert fitted_order(dts, errs) == pytest.approx(2.0, abs=0.2)

    def test_strang_invariant_drift(self):
        # each split sub-flow preserves mass and momentum; only the energy feels the splitting error
        g = Grid(16)
        p = SystemParams()
        s0 = smooth_random_state(g, 11)

        def invariants(s):
            return np.array([mass(s.u), momentum_L(s.u, s.v, p), energy_E(s.u, s.v, p)])

        ref = invariants(s0)
        dts = [4e-4, 2e-4, 1e-4]
        drift = np.array([np.abs(invariants(integrate(s0, 1.0, SolverConfig(dt, "strang"), p).state) - ref) / np.abs(ref)
                          for dt in dts])
        assert drift[:, :2].max() < 1e-11
        assert fitted_order(dts, drift[:, 2]) == pytest.approx(2.0, abs=0.2)


class TestIntegrate:
    def test_lands_on_end_time(self):
        g = Grid(8)
        res = integrate(smooth_random_state(g, 1), 0.1, SolverConfig(0.03), SystemParams())
        assert res.steps == 4
        assert res.state.t == pytest.approx(0.1, abs=1e-15)

    def test_observer_records(self):
        g = Grid(8)
        res = integrate(smooth_random_state(g, 1), 0.1, SolverConfig(0.01), SystemParams(),
                        observers=[lambda s: {"u0": abs(s.u.coeff(0))}], stride=4)
        assert [round(r["t"], 12) for r in res.records] == [0.0, 0.04, 0.08, 0.1]

    def test_instability_is_reported(self):
        g = Grid(32)
        s0 = smooth_random_state(g, 1, amplitude=20.0, decay=0.1)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(InstabilityError) as exc:
                integrate(s0, 200.0, SolverConfig(0.5, "strang"), SystemParams())
        assert exc.value.t > 0

    def test_single_step_helpers_agree(self):
        g = Grid(8)
        s0 = smooth_random_state(g, 2)
        p = SystemParams()
        assert coeff_error(step_strang(s0, 0.01, p), step(s0, SolverConfig(0.01, "strang"), p)) == 0
        assert coeff_error(step_oracle(s0, 0.01, p), integrate(s0, 0.01, SolverConfig(0.01, "oracle_rk4"), p).state) == 0

    def test_sample_trajectory(self):
        g = Grid(8)
        s0 = smooth_random_state(g, 3)
        tr = sample_trajectory(s0, [0.05, 0.0, 0.02], SolverConfig(0.01), SystemParams())
        assert sorted(tr) == [0.0, 0.02, 0.05]
        assert tr[0.05].t == 0.05
        with pytest.raises(ConfigurationError):
            sample_trajectory(tr[0.05], [0.01], SolverConfig(0.01), SystemParams())

    @given(st.integers(0, 10_000), st.sampled_from(["strang", "lawson_rk4"]))
    def test_v_stays_real_and_mean_free(self, seed, scheme):
        g = Grid(16)
        out = integrate(smooth_random_state(g, seed), 0.05, SolverConfig(0.01, scheme), SystemParams()).state
        assert out.v.coeffs[0] == 0
        n = np.arange(1, g.K + 1)
        assert np.allclose(out.v.coeffs[-n], np.conj(out.v.coeffs[n]), atol=0)
        assert math.isfinite(out.t)
