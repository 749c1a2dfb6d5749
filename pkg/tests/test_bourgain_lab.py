import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlskdv_lab.bourgain_lab import (CutoffProfile, SpaceTimeField, check_hypotheses, companion_norm,
                                     cutoff_sobolev_norm, estimate_ratio, l2_l1_part, lp_norm, product,
                                     psi, random_field, strichartz_ratio, strichartz_single, xt_norm)
from nlskdv_lab.errors import ConfigurationError, HypothesisViolation
from nlskdv_lab.spectral_core import TWO_PI, Grid

G8 = Grid(8)


def field(seed, tag="schrodinger", M=8, M_t=16, window=4.0):
    return random_field(Grid(M), M_t, window, tag, np.random.default_rng(seed))


def harmonic(n0, k0, M=8, M_t=16, window=2.0, tag="schrodinger"):
    c = np.zeros((M, M_t), complex)
    c[n0 % M, k0 % M_t] = 1.0
    return SpaceTimeField.from_spectrum(Grid(M), c, window, tag)


class TestCutoff:
    def test_plateau_and_support(self):
        t = np.array([-3.0, -2.0, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0])
        v = psi(t)
        assert list(v[[2, 3, 4, 5]]) == [1.0, 1.0, 1.0, 1.0]
        assert v[0] == v[1] == v[7] == 0.0
        assert 0.0 < v[6] < 1.0

    @given(st.floats(-5, 5), st.floats(0.05, 4))
    def test_bounds_and_symmetry(self, t, scale):
        prof = CutoffProfile(scale)
        assert 0.0 <= prof(t) <= 1.0
        assert prof(t) == prof(-t)

    def test_bad_scale(self):
        with pytest.raises(ConfigurationError):
            CutoffProfile(0.0)


class TestNorms:
    def test_plancherel(self):
        f = field(1)
        assert xt_norm(f, 0.0, 0.0) == pytest.approx(f.l2_norm(), rel=1e-12)

    def test_single_harmonic_closed_forms(self):
        f = harmonic(2, 3)
        tau = TWO_PI * 3 / 2.0
        mod = 1 + abs(tau + 4)
        assert xt_norm(f, 1.0, 0.5) == pytest.approx(np.sqrt(TWO_PI * 2.0) * 3 * mod ** 0.5, rel=1e-12)
        expect = np.sqrt(TWO_PI * 2.0) * 3 * mod ** -0.5 + TWO_PI * 3 / mod
        assert companion_norm(f, 1.0, "Z") == pytest.approx(expect, rel=1e-10)
        g = harmonic(-1, -2, tag="airy")
        mod_a = 1 + abs(TWO_PI * -2 / 2.0 + 1)
        assert companion_norm(g, 0.0, "W") == pytest.approx(np.sqrt(TWO_PI * 2.0) * mod_a ** -0.5 + TWO_PI / mod_a,
                                                            rel=1e-10)

    def test_zero_field(self):
        f = SpaceTimeField(G8, np.zeros((8, 16)), 1.0, "airy")
        assert companion_norm(f, 1.0) == 0.0
        assert xt_norm(f, 1.0, 0.5) == 0.0

    def test_companion_dominates_its_parts(self):
        f = field(2)
        assert companion_norm(f, 0.5) >= xt_norm(f, 0.5, -0.5)
        assert companion_norm(f, 0.5) >= l2_l1_part(f, 0.5)

    def test_scaling(self):
        f = field(3)
        assert xt_norm(f * 2.0, 0.3, 0.4) == 2.0 * xt_norm(f, 0.3, 0.4)

    @given(st.integers(0, 1000), st.floats(-1, 1), st.floats(0.01, 1), st.floats(-1, 1))
    def test_monotone_in_b_and_reg(self, seed, b, d, reg):
        f = field(seed)
        assert xt_norm(f, reg, b + d) >= xt_norm(f, reg, b)
        assert xt_norm(f, reg + d, b) >= xt_norm(f, reg, b)

    def test_tag_required(self):
        f = field(1, tag="none")
        with pytest.raises(ConfigurationError):
            xt_norm(f, 0, 0)
        with pytest.raises(ConfigurationError):
            companion_norm(f, 0)
        with pytest.raises(ConfigurationError):
            companion_norm(field(1), 0, "W")

    def test_lattice_invariants(self):
        with pytest.raises(ConfigurationError):
            SpaceTimeField(G8, np.zeros((8, 15)))
        with pytest.raises(ConfigurationError):
            SpaceTimeField(G8, np.zeros((8, 16)), dispersion_tag="kdv")

    def test_free_solution_quadrature(self):
        """X^{0,b} of ψ(t) U(t) e^{ix} equals ||ψ||_{H^b} ||e^{ix}||_{L²}."""
        window = TWO_PI * 256
        f = SpaceTimeField.from_function(G8, lambda x, t: psi(t) * np.exp(1j * (x - t)), 2 ** 17, window,
                                         "schrodinger")
        for b in (0.375, 0.5):
            expect = cutoff_sobolev_norm(b) * np.sqrt(TWO_PI)
            assert xt_norm(f, 0.0, b) == pytest.approx(expect, rel=1e-6)


class TestProducts:
    def test_l4_norm_of_harmonic(self):
        f = harmonic(1, 1, window=3.0)
        assert lp_norm(f, 4) == pytest.approx((TWO_PI * 3.0) ** 0.25, rel=1e-12)

    def test_product_of_harmonics(self):
        a, b = harmonic(1, 2), harmonic(2, -1)
        p = product([a, b], "airy")
        c = p.spectrum()
        assert p.M == 16 and p.M_t == 32
        assert c[3, 1] == pytest.approx(1.0, abs=1e-14)
        assert np.sum(np.abs(c)) == pytest.approx(1.0, abs=1e-12)

    def test_product_is_exact_convolution(self):
        a, b, c = field(1), field(2), field(3)
        p = product([a, b, c], "schrodinger")
        # the triple product's mean equals the convolution sum at (0, 0)
        ca, cb, cc = (f.spectrum() for f in (a, b, c))
        Ma, Mt = ca.shape
        total = 0j
        for n1 in range(-3, 4):
            for n2 in range(-3, 4):
                n3 = -n1 - n2
                if abs(n3) > 3:
                    continue
                for k1 in range(-7, 8):
                    for k2 in range(-7, 8):
                        k3 = -k1 - k2
                        if abs(k3) > 7:
                            continue
                        total += ca[n1 % Ma, k1 % Mt] * cb[n2 % Ma, k2 % Mt] * cc[n3 % Ma, k3 % Mt]
        assert p.spectrum()[0, 0] == pytest.approx(total, abs=1e-13)


class TestRatios:
    def test_strichartz_deterministic_and_homogeneous(self):
        f = harmonic(1, 1, window=4.0)
        r1, r2 = strichartz_single(f), strichartz_single(f)
        assert r1 == r2 and 0 < r1 < np.inf
        assert strichartz_single(f * 3.5) == pytest.approx(r1, rel=1e-12)
        a = strichartz_ratio(5, Grid(16), 9)
        b = strichartz_ratio(5, Grid(16), 9)
        assert np.array_equal(a["X"].ratios, b["X"].ratios)
        assert np.array_equal(a["Y"].ratios, b["Y"].ratios)

    def test_seed_partition_independence(self):
        a = estimate_ratio("uv", {"k": 1, "s": 1}, 6, 4)
        b = estimate_ratio("uv", {"k": 1, "s": 1}, 3, 4)
        assert np.array_equal(a.ratios[:3], b.ratios)

    def test_uv_bounded_at_k_equal_s(self):
        r = estimate_ratio("uv", {"k": 1, "s": 1}, 100, 2)
        assert np.isfinite(r.max) and r.max < 1.0

    def test_time_localization_exponent(self):
        r = estimate_ratio("time_loc", {"b": 0.5, "b_prime": 0.375}, 30, 5, M=8, M_t=2048)
        assert r.exponent >= 0.025
        assert set(r.per_scale) == {2.0 ** -j for j in range(1, 7)}

    @pytest.mark.parametrize("lemma,params,fragment", [
        ("uv", {"k": 3, "s": 1}, "k - s <= 3/2"),
        ("uv", {"k": 0, "s": -0.5}, "s >= 0"),
        ("u2u", {"k": -0.1}, "k >= 0"),
        ("dv2", {"s": -0.75}, "s >= -1/2"),
        ("du2", {"k": 0.2, "s": 0.5}, "1 + s <= 4k"),
        ("du2", {"k": 1.0, "s": 2.0}, "k - s >= -1/2"),
        ("time_loc", {"b": 0.3, "b_prime": 0.4}, "b' <= b"),
        ("time_loc", {"b": 0.3, "b_prime": -0.5}, "-1/2 < b'"),
        ("time_loc", {"b": 0.6, "b_prime": 0.4}, "b <= 1/2"),
    ])
    def test_out_of_hypothesis_rejected(self, lemma, params, fragment):
        with pytest.raises(HypothesisViolation) as exc:
            estimate_ratio(lemma, params, 1, 0)
        assert fragment in str(exc.value)

    @pytest.mark.parametrize("lemma,params", [("u2u", {"k": 0}), ("dv2", {"s": -0.5}), ("uv", {"k": 1.5, "s": 0}),
                                              ("du2", {"k": 0.25, "s": 0}), ("time_loc", {"b": 0.5, "b_prime": 0.5})])
    def test_boundary_cases_accepted(self, lemma, params):
        check_hypotheses(lemma, params)

    def test_unknown_lemma_and_missing_params(self):
        with pytest.raises(ConfigurationError):
            check_hypotheses("kdv", {})
        with pytest.raises(ConfigurationError):
            check_hypotheses("uv", {"k": 1})

    @given(st.floats(0.1, 100))
    def test_ratios_scale_invariant(self, c):
        f = field(11)
        g = field(12, tag="airy")
        from nlskdv_lab.bourgain_lab import _ratio_uv
        fields = iter([f, g])
        base = _ratio_uv({"k": 1, "s": 1}, lambda tag, zero_mean=False: next(fields))
        fields = iter([f * c, g * c])
        scaled = _ratio_uv({"k": 1, "s": 1}, lambda tag, zero_mean=False: next(fields))
        assert scaled == pytest.approx(base, rel=1e-10)
