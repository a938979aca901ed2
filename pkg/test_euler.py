#!/usr/bin/env python3
import math

import numpy as np
import pytest

from supercrit.advection import advect
from supercrit.errors import BlowUpError
from supercrit.euler import (
    DiagnosticSeries, EulerSolver, SolverConfig, norm_log, reversibility_error, run, step_rk4,
    step_split_iterate,
)
from supercrit.fields import gaussian_vortex, single_mode, vortex_pair
from supercrit.multipliers import ConstantMultiplier, IteratedLogMultiplier
from supercrit.spectral import Grid, SpectralField, dealias


def config_for(grid, m, **overrides):
    params = {"dt": 0.02, "t_end": 0.4, "cadence": 0.2}
    params.update(overrides)
    return SolverConfig(grid=grid, multiplier=m, **params)


class TestConfig:
    @pytest.mark.parametrize("overrides", [
        {"cfl_safety": 0.0},
        {"t_end": 0.0},
        {"cadence": -1.0},
        {"dt": 0.0},
        {"inner_iterations": 0},
        {"s_list": (1.5,)},
        {"s_list": ()},
        {"stepper": "euler"},
    ])
    def test_rejects(self, grid64, classical, overrides):
        with pytest.raises(ValueError):
            config_for(grid64, classical, **overrides)

    def test_stepper_coerced(self, grid64, classical):
        assert config_for(grid64, classical, stepper="split").stepper.value == "split"

    def test_norm_log(self):
        assert norm_log(0.0) == 1.0
        assert norm_log(1e6) == pytest.approx(math.log(math.e + 1e6))


class TestStationary:
    @pytest.mark.parametrize("m", [ConstantMultiplier(1.0), IteratedLogMultiplier((1.0,))])
    def test_single_mode_is_steady(self, grid64, m):
        omega0 = single_mode(grid64, (1, 0))
        result = run(config_for(grid64, m), omega0)
        np.testing.assert_allclose(result.final.values, omega0.values, atol=1e-12)
        assert result.checks["no_blow_up"]
        assert result.fits[0.5] == 1e-6

    def test_radial_vortex_drift_is_image_strain(self, grid128):
        # periodic images strain a radial vortex with a cos(4 theta) field whose relative effect scales
        # like (radius / L)^4, so halving the radius cuts the drift sixteenfold
        m = ConstantMultiplier(1.0)
        drift = {}
        for radius in (0.2, 0.4):
            omega0 = dealias(gaussian_vortex(grid128, radius=radius))
            result = run(config_for(grid128, m, t_end=1.0, cadence=0.5), omega0)
            drift[radius] = (result.final - omega0).l2_norm() / omega0.l2_norm()
        assert drift[0.2] < 5e-5
        assert 12.0 < drift[0.4] / drift[0.2] < 20.0

    def test_split_step_keeps_shear_mode(self, grid64, loglog):
        omega = single_mode(grid64, (1, 0))
        stepped = step_split_iterate(omega, config_for(grid64, loglog, stepper="split"), dt=0.05)
        np.testing.assert_allclose(stepped.values, omega.values, atol=1e-10)

    def test_split_freezes_previous_iterate_velocity(self, grid64, loglog):
        omega = vortex_pair(grid64)
        solver = EulerSolver(config_for(grid64, loglog, stepper="split", inner_iterations=2))
        first = advect(omega, solver.velocity(omega), 0.05)
        second = advect(omega, solver.velocity(first), 0.05)
        np.testing.assert_array_equal(solver.step_split_iterate(omega, 0.05).values, second.values)


class TestDynamics:
    def test_vortex_pair_rk4(self, grid64, loglog):
        result = run(config_for(grid64, loglog), vortex_pair(grid64))
        series = result.series
        assert list(series.times) == pytest.approx([0.0, 0.2, 0.4])
        assert result.checks["l2_conservation"]
        assert result.checks["linf_growth"]
        assert result.checks["no_blow_up"]
        assert result.checks["bkm"]
        np.testing.assert_allclose(series.column("mean"), series.column("mean")[0], atol=1e-12)
        assert np.all(series.column("lsob_ratio") > 0)
        row = series.rows()[-1]
        assert {"t", "L2", "Linf", "Cs_proxy_0.5", "f_0.5", "grad_u_inf", "lsob_ratio"} <= set(row)
        assert len(result.snapshots) == 2

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [ConstantMultiplier(1.0), IteratedLogMultiplier((1.0,))])
    def test_vortex_pair_long_run(self, m):
        grid = Grid(256)
        config = SolverConfig(grid=grid, multiplier=m, cfl_safety=0.5, t_end=5.0, cadence=0.25)
        result = run(config, vortex_pair(grid))
        for check in ("l2_conservation", "linf_growth", "bkm", "no_blow_up"):
            assert result.checks[check], check
        assert all(c is not None and c <= 1e3 for c in result.fits.values())

    def test_split_agrees_with_rk4(self, grid64, loglog):
        omega0 = vortex_pair(grid64)
        reference = run(config_for(grid64, loglog, t_end=0.2, cadence=0.2), omega0).final
        split = run(config_for(grid64, loglog, t_end=0.2, cadence=0.2, stepper="split"), omega0).final
        assert (split - reference).l2_norm() / reference.l2_norm() < 1e-2

    def test_reversibility(self, grid64, loglog):
        error = reversibility_error(config_for(grid64, loglog), vortex_pair(grid64), 0.2)
        assert error < 1e-6

    def test_constant_multiplier_rescales_time(self, grid64, classical):
        # m = 2 runs the classical flow at double speed
        omega0 = vortex_pair(grid64)
        slow = run(config_for(grid64, classical, t_end=0.4), omega0).final
        fast = run(config_for(grid64, ConstantMultiplier(2.0), t_end=0.2, cadence=0.1), omega0).final
        assert (fast - slow).l2_norm() / slow.l2_norm() < 1e-5

    def test_cfl_adaptive_run(self, loglog):
        grid = Grid(32)
        result = run(SolverConfig(grid=grid, multiplier=loglog, t_end=0.3, cadence=0.1), vortex_pair(grid))
        assert len(result.series.records) == 4
        assert result.series.times[-1] == pytest.approx(0.3)

    def test_snapshot_cadence(self, grid64, classical):
        result = run(config_for(grid64, classical, snapshot_every=1), single_mode(grid64, (1, 1)))
        assert [t for t, _ in result.snapshots] == pytest.approx([0.0, 0.2, 0.4])


class TestFailures:
    def test_non_finite_state(self, grid64, classical):
        values = np.zeros((64, 64))
        values[3, 3] = np.nan
        with pytest.raises(BlowUpError):
            EulerSolver(config_for(grid64, classical)).step_rk4(SpectralField(grid64, values=values), 0.01)

    def test_step_helper(self, grid64, classical):
        omega = single_mode(grid64, (0, 2))
        stepped = step_rk4(omega, config_for(grid64, classical), dt=0.05)
        np.testing.assert_allclose(stepped.values, omega.values, atol=1e-12)

    def test_advection_term_is_dealiased(self, grid64, loglog):
        solver = EulerSolver(config_for(grid64, loglog))
        omega = vortex_pair(grid64)
        rhs = solver._rhs(np.array(omega.coefficients))
        assert np.all(rhs[grid64.dealias_mask] == 0)
        assert rhs[0, 0] == 0
        assert np.max(np.abs(rhs)) > 0

    def test_series_times_increase(self, grid64, classical):
        solver = EulerSolver(config_for(grid64, classical))
        series = DiagnosticSeries((0.5,))
        omega = single_mode(grid64, (1, 0))
        series.append(solver.diagnostics(omega, 0.0))
        with pytest.raises(ValueError):
            series.append(solver.diagnostics(omega, 0.0))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
