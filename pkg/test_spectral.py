#!/usr/bin/env python3
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from supercrit.fields import (
    FieldCorpus, gaussian_vortex, random_field, single_mode, straight_edge_level_set, vortex_pair,
)
from supercrit.multipliers import ConstantMultiplier, IteratedLogMultiplier
from supercrit.spectral import (
    Grid, SpectralField, apply_multiplier, biot_savart, dealias, gradient, gradient_sup,
    interpolate_periodic, multiplier_symbol, partial_derivative, perp_gradient, riesz_symbol,
)


class TestGrid:
    @pytest.mark.parametrize("N", [8, 48, 100])
    def test_rejects_bad_sizes(self, N):
        with pytest.raises(ValueError, match="power of two"):
            Grid(N)

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError):
            Grid(32, L=-1.0)

    def test_wavenumbers(self):
        grid = Grid(32, L=4.0 * math.pi)
        assert grid.scale == pytest.approx(0.5)
        assert grid.spectral_shape == (32, 17)
        assert grid.k1[1, 0] == pytest.approx(0.5)
        assert grid.k2[0, 16] == pytest.approx(8.0)
        assert grid.nyquist_mask[16, 3] and grid.nyquist_mask[3, 16]
        assert not grid.dealias_mask[10, 10] and grid.dealias_mask[11, 0]


class TestFields:
    def test_parseval(self, grid64):
        f = FieldCorpus(3, cutoff=10).sample(grid64, 0)
        assert f.coefficient_l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)

    def test_values_coefficients_agree(self, grid64):
        f = single_mode(grid64, (2, 1), amplitude=3.0)
        back = SpectralField(grid64, coefficients=f.coefficients)
        np.testing.assert_allclose(back.values, f.values, atol=1e-12)
        assert f.mean == pytest.approx(0.0, abs=1e-14)

    def test_shape_checked(self, grid64):
        with pytest.raises(ValueError):
            SpectralField(grid64, values=np.zeros((32, 32)))
        with pytest.raises(ValueError):
            SpectralField(grid64)

    def test_corpus_is_grid_independent(self, grid64, grid128):
        corpus = FieldCorpus(seed=5, count=2, cutoff=12, slope=2.0)
        coarse = corpus.sample(grid64, 1)
        fine = corpus.sample(grid128, 1)
        np.testing.assert_allclose(fine.values[::2, ::2], coarse.values, atol=1e-12)

    def test_corpus_cutoff_checked(self, grid64):
        with pytest.raises(ValueError, match="N/3"):
            FieldCorpus(seed=0, cutoff=22).sample(grid64, 0)

    def test_corpus_band_limits_vary(self):
        corpus = FieldCorpus(seed=2, count=12, cutoff=16, cutoff_min=2)
        n1 = np.arange(-16, 17)[:, None]
        n2 = np.arange(0, 17)[None, :]
        radius = np.broadcast_to(np.sqrt(n1 ** 2 + n2 ** 2), (33, 17))
        tops = [radius[corpus.coefficients(i) != 0].max() for i in range(corpus.count)]
        assert all(1.0 <= top <= 16.0 for top in tops)
        assert max(tops) / min(tops) > 2.0
        with pytest.raises(ValueError, match="cutoff_min"):
            FieldCorpus(seed=0, cutoff=8, cutoff_min=9)

    def test_random_field_normalized(self, grid64):
        f = random_field(grid64, seed=4, amplitude=2.0)
        assert f.sup_norm() == pytest.approx(2.0)

    def test_vortex_pair_symmetric(self, grid64):
        omega = vortex_pair(grid64, separation=1.0, radius=0.3)
        # mirror image about x1 = L/2 maps the grid onto itself shifted by one index
        mirrored = np.roll(omega.values[::-1, :], 1, axis=0)
        np.testing.assert_allclose(mirrored, omega.values, atol=1e-12)

    def test_gaussian_is_periodic_bump(self, grid64):
        omega = gaussian_vortex(grid64, center=(0.0, 0.0), radius=0.3)
        assert omega.values[0, 0] == pytest.approx(1.0)
        assert omega.values[1, 0] == pytest.approx(omega.values[-1, 0])


class TestOperators:
    def test_single_mode_velocity(self, grid64, classical):
        omega = single_mode(grid64, (1, 0))
        u = biot_savart(omega, classical)
        x1, _ = grid64.coordinates
        np.testing.assert_allclose(u.u1.values, 0.0, atol=1e-12)
        np.testing.assert_allclose(u.u2.values, np.sin(x1), atol=1e-12)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=20, deadline=None)
    def test_divergence_free_and_curl(self, seed):
        grid = Grid(64)
        omega = FieldCorpus(seed, cutoff=12).sample(grid, 0)
        u = biot_savart(omega, ConstantMultiplier(1.0))
        scale = omega.sup_norm()
        assert u.divergence().sup_norm() <= 1e-10 * scale
        np.testing.assert_allclose(u.curl().values, omega.values, atol=1e-10 * scale)

    def test_constant_multiplier_scales_velocity(self, grid64):
        omega = FieldCorpus(1, cutoff=8).sample(grid64, 0)
        base = biot_savart(omega, ConstantMultiplier(1.0))
        scaled = biot_savart(omega, ConstantMultiplier(3.0))
        np.testing.assert_allclose(scaled.u1.values, 3.0 * base.u1.values, atol=1e-12)
        np.testing.assert_allclose(scaled.u2.values, 3.0 * base.u2.values, atol=1e-12)

    def test_loglog_velocity_is_rougher(self, grid64, classical, loglog):
        omega = gaussian_vortex(grid64, radius=0.2)
        assert gradient_sup(biot_savart(omega, loglog)) > gradient_sup(biot_savart(omega, classical))

    def test_multiplier_symbol_clamped_at_zero_mode(self, grid64, loglog):
        symbol = multiplier_symbol(grid64, loglog)
        assert symbol[0, 0] == pytest.approx(loglog.eval(2.0))
        assert symbol[5, 0] == pytest.approx(loglog.eval(5.0))

    def test_apply_multiplier(self, grid64):
        f = single_mode(grid64, (4, 0))
        m = IteratedLogMultiplier((1.0,))
        np.testing.assert_allclose(apply_multiplier(f, m).values, m.eval(4.0) * f.values, atol=1e-12)

    def test_derivatives(self, grid64):
        x1, x2 = grid64.coordinates
        f = SpectralField(grid64, values=np.sin(2.0 * x1) * np.cos(3.0 * x2))
        np.testing.assert_allclose(partial_derivative(f, 0).values, 2.0 * np.cos(2.0 * x1) * np.cos(3.0 * x2), atol=1e-11)
        np.testing.assert_allclose(partial_derivative(f, 1).values, -3.0 * np.sin(2.0 * x1) * np.sin(3.0 * x2), atol=1e-11)
        perp = perp_gradient(f)
        grad = gradient(f)
        np.testing.assert_allclose(perp.dot(grad), 0.0, atol=1e-10)

    def test_nyquist_derivative_is_real(self, grid64):
        x1, _ = grid64.coordinates
        f = SpectralField(grid64, values=np.cos(32.0 * x1))
        assert partial_derivative(f, 0).sup_norm() == pytest.approx(0.0, abs=1e-12)

    def test_dealias(self, grid64):
        kept = single_mode(grid64, (20, 0))
        removed = single_mode(grid64, (22, 5))
        np.testing.assert_allclose(dealias(kept + removed).values, kept.values, atol=1e-12)

    def test_riesz_partition_of_unity(self, grid64):
        total = riesz_symbol(grid64, 1, 1) + riesz_symbol(grid64, 2, 2)
        valid = (grid64.kmag_squared > 0) & ~grid64.nyquist_mask
        np.testing.assert_allclose(total[valid], 1.0, atol=1e-14)
        assert total[0, 0] == 0.0
        np.testing.assert_allclose(riesz_symbol(grid64, 1, 2), riesz_symbol(grid64, 2, 1))

    def test_interpolation(self, grid64):
        f = single_mode(grid64, (1, 1))
        rng = np.random.default_rng(0)
        points = rng.uniform(0.0, grid64.L, size=(50, 2))
        exact = np.cos(points[:, 0] + points[:, 1])
        np.testing.assert_allclose(interpolate_periodic(f, points), exact, atol=1e-3)

    def test_straight_edge(self, grid64):
        phi = straight_edge_level_set(grid64)
        magnitude = gradient(phi).magnitude()
        edge = np.abs(phi.values) < 2.0 * grid64.dx
        np.testing.assert_allclose(magnitude[edge], 1.0, atol=0.05)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
