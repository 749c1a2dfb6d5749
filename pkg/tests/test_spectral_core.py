import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlskdv_lab.errors import SizeError
from nlskdv_lab.spectral_core import (TWO_PI, Grid, SpectralField, dealiased_product, derivative,
                                      forward_transform, inner, integral, integral_of_product,
                                      inverse_transform, project_zero_mean, sobolev_norm)


def random_field(grid, rng, real=False):
    c = rng.standard_normal(grid.M) + 1j * rng.standard_normal(grid.M)
    return SpectralField(grid, c, real=real)


def brute_convolution(fields, K):
    """Coefficients of the product on |n| <= K by direct summation over modes."""
    maps = [{int(n): f.coeff(int(n)) for n in f.grid.modes} for f in fields]
    acc = maps[0]
    for m in maps[1:]:
        nxt = {}
        for a, ca in acc.items():
            for b, cb in m.items():
                nxt[a + b] = nxt.get(a + b, 0) + ca * cb
        acc = nxt
    return {n: acc.get(n, 0) for n in range(-K, K + 1)}


class TestGrid:
    def test_active_modes(self):
        g = Grid(8)
        assert g.K == 3
        assert list(g.modes) == [-3, -2, -1, 0, 1, 2, 3]
        assert list(g.n) == [0, 1, 2, 3, 0, -3, -2, -1]

    @pytest.mark.parametrize("M", [6, 9, 0, -8])
    def test_rejects_bad_sizes(self, M):
        with pytest.raises(SizeError):
            Grid(M)

    def test_rejects_non_integer(self):
        with pytest.raises(SizeError):
            Grid(8.0)


class TestField:
    def test_nyquist_is_cleared(self):
        g = Grid(8)
        f = SpectralField(g, np.ones(8))
        assert f.coeffs[4] == 0

    def test_real_field_is_hermitian(self, rng):
        f = random_field(Grid(16), rng, real=True)
        for n in range(1, 8):
            assert f.coeff(-n) == pytest.approx(np.conj(f.coeff(n)))
        assert not np.iscomplexobj(inverse_transform(f))

    def test_from_modes_and_lookup(self):
        f = SpectralField.from_modes(Grid(8), {2: 1.5, -1: 2j})
        assert f.coeff(2) == 1.5 and f.coeff(-1) == 2j and f.coeff(0) == 0

    def test_length_mismatch(self):
        with pytest.raises(SizeError):
            SpectralField(Grid(8), np.zeros(10))


class TestTransforms:
    def test_plane_wave_coefficients(self):
        g = Grid(16)
        f = forward_transform(np.exp(3j * g.x))
        assert f.coeff(3) == pytest.approx(1.0, abs=1e-15)
        assert np.sum(np.abs(f.coeffs)) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("M", [8, 16, 32, 64, 128, 256, 512, 1024])
    def test_round_trip_from_field(self, rng, M):
        g = Grid(M)
        f = random_field(g, rng)
        back = forward_transform(inverse_transform(f), g)
        assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-12 * np.max(np.abs(f.coeffs))

    @pytest.mark.parametrize("M", [8, 64, 1024])
    def test_round_trip_from_samples_without_nyquist(self, rng, M):
        g = Grid(M)
        samples = inverse_transform(random_field(g, rng))
        again = inverse_transform(forward_transform(samples, g))
        assert np.max(np.abs(again - samples)) <= 1e-12 * np.max(np.abs(samples))

    def test_nyquist_samples_are_dropped(self):
        g = Grid(8)
        f = forward_transform(np.cos(4 * g.x))
        assert np.all(f.coeffs == 0)

    def test_derivative_of_sine(self):
        g = Grid(16)
        f = forward_transform(np.sin(2 * g.x), g, real=True)
        d2 = inverse_transform(derivative(f, 2))
        assert np.max(np.abs(d2 + 4 * np.sin(2 * g.x))) < 1e-13

    def test_derivative_rejects_bad_order(self):
        with pytest.raises(ValueError):
            derivative(SpectralField.zeros(Grid(8)), 0)


class TestProducts:
    @pytest.mark.parametrize("q", [2, 3])
    def test_matches_brute_force_convolution(self, rng, q):
        g = Grid(12)
        fs = [random_field(g, rng) for _ in range(q)]
        p = dealiased_product(fs)
        ref = brute_convolution(fs, g.K)
        for n, c in ref.items():
            assert p.coeff(n) == pytest.approx(c, abs=1e-12)

    @pytest.mark.parametrize("q", [1, 2, 3, 4])
    def test_integral_is_exact(self, rng, q):
        g = Grid(10)
        fs = [random_field(g, rng) for _ in range(q)]
        full = brute_convolution(fs, 4 * g.K) if q > 1 else {0: fs[0].coeff(0)}
        assert integral_of_product(fs) == pytest.approx(TWO_PI * full[0], rel=1e-12, abs=1e-12)

    def test_factor_count_limits(self, rng):
        g = Grid(8)
        f = random_field(g, rng)
        with pytest.raises(SizeError):
            dealiased_product([f])
        with pytest.raises(SizeError):
            integral_of_product([f] * 5)

    def test_grid_mismatch(self, rng):
        with pytest.raises(SizeError):
            dealiased_product([random_field(Grid(8), rng), random_field(Grid(16), rng)])


class TestNorms:
    def test_single_mode_sobolev_norm(self):
        f = SpectralField.from_modes(Grid(16), {3: 1.0})
        assert sobolev_norm(f, 1.0) == pytest.approx(np.sqrt(TWO_PI) * 4.0, rel=1e-15)
        assert sobolev_norm(f, 0.0) == pytest.approx(np.sqrt(TWO_PI), rel=1e-15)

    def test_integral_and_zero_mean(self, rng):
        f = random_field(Grid(8), rng)
        assert integral(f) == pytest.approx(TWO_PI * f.coeff(0))
        assert integral(project_zero_mean(f)) == 0

    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([8, 16, 32]))
    def test_parseval(self, seed, M):
        g = Grid(M)
        f = random_field(g, np.random.default_rng(seed))
        samples = inverse_transform(f)
        phys = TWO_PI / M * np.sum(np.abs(samples) ** 2)
        assert inner(f, f).real == pytest.approx(phys, rel=1e-12)
        assert sobolev_norm(f, 0.0) ** 2 == pytest.approx(phys, rel=1e-12)

    @given(st.integers(0, 2 ** 32 - 1), st.floats(-2, 2), st.floats(0.01, 1))
    def test_sobolev_monotone_in_s(self, seed, s, ds):
        f = random_field(Grid(16), np.random.default_rng(seed))
        assert sobolev_norm(f, s + ds) >= sobolev_norm(f, s)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_product_commutes(self, seed):
        r = np.random.default_rng(seed)
        g = Grid(16)
        a, b = random_field(g, r), random_field(g, r)
        assert np.allclose(dealiased_product([a, b]).coeffs, dealiased_product([b, a]).coeffs, atol=1e-13)
