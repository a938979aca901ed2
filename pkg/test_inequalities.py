#!/usr/bin/env python3
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from supercrit import bessel
from supercrit.errors import QuadratureError
from supercrit.fields import FieldCorpus, single_mode
from supercrit.inequalities import (
    RatioReport, commutator, commutator_ratio, commutator_sweep, compute_radial_kernel,
    default_rho_grid, kernel_derivatives, kernel_summary, kernel_value, main_inequality_ratio,
    main_inequality_sweep, merge_reports, operator_symbol, oscillatory_integral, refinement_change,
    tangential_holder_ratio, tangential_holder_sweep,
)
from supercrit.multipliers import ConstantMultiplier
from supercrit.patch import ellipse_state
from supercrit.spectral import Grid, SpectralField

CLASSICAL = ConstantMultiplier(1.0)


class TestRatioReport:
    def test_summary(self):
        report = RatioReport("r", [0.5, 2.0, 1.0], [10, 11, 12])
        assert report.max == 2.0
        assert report.median == 1.0
        assert report.argmax_seed == 11
        data = report.to_dict()
        assert data["count"] == 3
        assert data["samples"][1] == {"seed": 11, "ratio": 2.0}

    def test_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            RatioReport("r", [1.0, math.inf], [0, 1])

    def test_q_trend(self):
        q = [2.0, 4.0, 8.0, 0.5]
        extras = [{"Q": value} for value in q]
        ratios = [math.sqrt(value) for value in q]
        assert RatioReport("r", ratios, [0, 1, 2, 3], extras).q_trend() == pytest.approx(0.5)
        assert RatioReport("r", ratios[:2], [0, 1], extras[:2]).q_trend() is None

    def test_merge_and_refinement(self):
        coarse = RatioReport("a", [1.0, 2.0], [0, 1])
        fine = RatioReport("b", [2.2], [5])
        merged = merge_reports("both", [coarse, fine])
        assert merged.seeds == [0, 1, 5]
        assert merged.max == 2.2
        assert refinement_change(coarse, fine) == pytest.approx(0.1)


class TestMainInequality:
    def test_operator_symbols(self, grid64):
        assert np.all(operator_symbol(grid64, "identity") == 1.0)
        assert operator_symbol(grid64, "riesz12").shape == grid64.spectral_shape
        with pytest.raises(ValueError, match="unknown operator"):
            operator_symbol(grid64, "hilbert")

    def test_single_mode_closed_form(self, grid64, loglog):
        g = single_mode(grid64, (5, 0))
        result = main_inequality_ratio(g, loglog, 0.5)
        # the (5, 0) mode sits in block 2, so the Y(s) norm is 2^(2 s) = 2
        q = 2.0 + g.l2_norm()
        assert g.l2_norm() == pytest.approx(math.pi * math.sqrt(2.0), rel=1e-12)
        assert result.Q == pytest.approx(q)
        assert not result.clamped
        assert result.cutoff == pytest.approx(math.log2(q))
        expected = loglog.eval(5.0) / (g.l2_norm() + 1.0 + math.log(q) * loglog.eval(q))
        assert result.ratio == pytest.approx(expected, rel=1e-9)
        assert main_inequality_ratio(g, loglog, 0.5, "riesz11").ratio == pytest.approx(expected, rel=1e-9)
        assert main_inequality_ratio(g, loglog, 0.5, "riesz22").ratio == pytest.approx(0.0, abs=1e-12)

    def test_constant_on_small_torus_is_clamped(self, loglog):
        # Y(s) = 2^-s and L2 = L for the constant 1, so Q < 1 when L < 1 - 2^-s
        grid = Grid(64, L=0.1)
        result = main_inequality_ratio(SpectralField(grid, values=np.ones((64, 64))), loglog, 0.5)
        assert result.clamped
        assert result.Q == 1.0
        assert result.cutoff == 0.0

    def test_rejects(self, grid64, loglog):
        with pytest.raises(ValueError):
            main_inequality_ratio(single_mode(grid64, (1, 0)), loglog, 0.0)
        with pytest.raises(ValueError, match="nonzero"):
            main_inequality_ratio(SpectralField(grid64, values=np.zeros((64, 64))), loglog, 0.5)

    def test_sweep(self, grid64, loglog):
        corpus = FieldCorpus(seed=7, count=4, cutoff=12)
        report = main_inequality_sweep(grid64, loglog, 0.5, "riesz12", corpus, threads=2)
        assert report.seeds == [7, 8, 9, 10]
        assert all(0.0 < r < math.inf for r in report.ratios)
        assert {"Q", "clamped", "Ncut"} <= set(report.extras[0])

    def test_no_upward_trend_over_band_limits(self, loglog):
        grid = Grid(128, L=math.pi / 4.0)
        corpus = FieldCorpus(seed=7, count=40, cutoff=40, slope=1.0, cutoff_min=1)
        report = main_inequality_sweep(grid, loglog, 1.0, "riesz12", corpus)
        q = [e["Q"] for e in report.extras]
        assert not any(e["clamped"] for e in report.extras)
        assert max(q) / min(q) >= 4.0
        assert report.q_trend() < 0.1

    def test_identity_ratio_decays_with_q(self):
        # with m = 1 and R = identity the ratio is 1 / (L2/sup + 1 + log Q) exactly
        grid = Grid(64, L=math.pi / 4.0)
        corpus = FieldCorpus(seed=3, count=20, cutoff=20, slope=1.0, cutoff_min=2)
        report = main_inequality_sweep(grid, CLASSICAL, 1.0, "identity", corpus)
        for index, (ratio, extra) in enumerate(zip(report.ratios, report.extras)):
            g = corpus.sample(grid, index)
            expected = 1.0 / (g.l2_norm() / g.sup_norm() + 1.0 + math.log(extra["Q"]))
            assert ratio == pytest.approx(expected, rel=1e-9)
        assert report.q_trend() < 0.0

    @given(st.integers(min_value=0, max_value=10_000), st.sampled_from([0.25, 0.5, 0.75]))
    @settings(max_examples=10, deadline=None)
    def test_ratio_is_bounded(self, seed, s):
        grid = Grid(64)
        g = FieldCorpus(seed, cutoff=16).sample(grid, 0)
        result = main_inequality_ratio(g, ConstantMultiplier(1.0), s)
        assert 0.0 < result.ratio < 10.0


class TestCommutator:
    def test_constant_multiplier_commutes(self, grid64):
        f = FieldCorpus(1, cutoff=6).sample(grid64, 0)
        g = FieldCorpus(2, cutoff=10).sample(grid64, 0)
        scale = f.sup_norm() * g.sup_norm()
        assert commutator(f, g, ConstantMultiplier(3.0)).sup_norm() <= 1e-12 * scale

    def test_loglog_ratio(self, grid64, loglog):
        f = FieldCorpus(1, cutoff=6).sample(grid64, 0)
        g = FieldCorpus(2, cutoff=16).sample(grid64, 0)
        ratio = commutator_ratio(f, g, loglog, 0.5)
        assert 0.0 < ratio < math.inf

    def test_zero_denominator(self, grid64, loglog):
        f = SpectralField(grid64, values=np.ones((64, 64)))
        g = single_mode(grid64, (3, 0))
        with pytest.raises(ValueError, match="denominator"):
            commutator_ratio(f, g, loglog, 0.5)
        with pytest.raises(ValueError):
            commutator_ratio(g, g, loglog, 1.5)

    def test_sweep(self, grid64, loglog):
        report = commutator_sweep(
            grid64, loglog, 0.5, FieldCorpus(3, count=3, cutoff=4), FieldCorpus(9, count=3, cutoff=16)
        )
        assert report.seeds == [9, 10, 11]
        assert [e["fSeed"] for e in report.extras] == [3, 4, 5]
        with pytest.raises(ValueError, match="N/8"):
            commutator_sweep(grid64, loglog, 0.5, FieldCorpus(3, cutoff=8), FieldCorpus(9, cutoff=16))


class TestTangentialHolder:
    def test_ellipse_ratio(self, grid64, loglog):
        row = tangential_holder_ratio(ellipse_state(grid64, 2.0, radius=1.0), loglog, 0.5)
        assert 0.0 < row["ratio"] < math.inf
        assert row["Delta"] > 0 and row["W_holder"] > 0

    def test_zero_amplitude(self, grid64, loglog):
        row = tangential_holder_ratio(ellipse_state(grid64, 2.0, a0=0.0, radius=1.0), loglog, 0.5)
        assert row["ratio"] == 0.0

    def test_sweep(self, grid64, loglog):
        rows = tangential_holder_sweep(grid64, loglog, [1.0, 2.0], 0.5, radius=1.0)
        assert [row["aspect"] for row in rows] == [1.0, 2.0]


class TestOscillatoryQuadrature:
    def test_classical_integrals(self):
        # int_0^inf J0 = int_0^inf J1 = 1 in the variable x = 2 pi s
        for nu, j in ((0, bessel.j0), (1, bessel.j1)):
            value = oscillatory_integral(lambda s: j(2.0 * math.pi * s), nu)
            assert value == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-7)

    def test_divergent_integrand(self):
        with pytest.raises(QuadratureError) as excinfo:
            oscillatory_integral(lambda s: bessel.j0(2.0 * math.pi * s) * np.exp(s), 0, max_intervals=60)
        assert len(excinfo.value.partial_sums) == 60


class TestRadialKernel:
    @pytest.mark.parametrize("rho", [0.01, 0.1, 1.0])
    def test_classical_derivatives(self, rho):
        fprime, fsecond = kernel_derivatives(CLASSICAL, rho)
        assert fprime == pytest.approx(-1.0 / (2.0 * math.pi * rho), rel=1e-6)
        assert fsecond == pytest.approx(1.0 / (2.0 * math.pi * rho ** 2), rel=1e-6)

    def test_classical_value_is_logarithmic(self):
        difference = kernel_value(CLASSICAL, 0.1) - kernel_value(CLASSICAL, 0.2)
        assert difference == pytest.approx(math.log(2.0) / (2.0 * math.pi), rel=1e-6)

    def test_classical_table(self):
        rows = compute_radial_kernel(CLASSICAL, [0.01, 0.1, 1.0])
        summary = kernel_summary(rows, rows)
        assert summary["logSlope"] == pytest.approx(-1.0 / (2.0 * math.pi), rel=1e-5)
        assert summary["majorantSup"] == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-5)
        assert summary["refinementChange"] == 0.0
        assert set(rows[0].to_dict()) == {"rho", "fhat", "fhat_prime", "fhat_second", "majorant_ratio"}

    def test_loglog_majorant_finite(self, loglog):
        rows = compute_radial_kernel(loglog, [0.01, 0.3])
        assert all(0.0 < row.majorant < math.inf for row in rows)
        assert all(row.fhat_prime < 0 for row in rows)

    @pytest.mark.parametrize("rhos", [[1e-4], [0.5, 2.0]])
    def test_radius_range(self, rhos):
        with pytest.raises(ValueError, match="1e-3"):
            compute_radial_kernel(CLASSICAL, rhos)

    def test_default_grid(self):
        rhos = default_rho_grid()
        assert rhos[0] == pytest.approx(1e-3)
        assert rhos[-1] == pytest.approx(1.0)
        assert np.all(np.diff(rhos) > 0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
