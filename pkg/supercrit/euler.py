"""
Pseudospectral solver for omega_t + u . grad omega = 0 with the modified
Biot-Savart law u = m(|D|) grad-perp Laplacian^-1 omega.

Two steppers: classical RK4 on the rfft coefficients with a 2/3-dealiased
advection term, and the splitting iteration that freezes the velocity of the
previous iterate and transports semi-Lagrangianly.
"""

import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from supercrit.advection import advect, cfl_limit, substeps
from supercrit.config import CFL_SAFETY
from supercrit.errors import BlowUpError, FitError
from supercrit.littlewood_paley import (
    build_partition, decompose, besov_norms, quasi_lipschitz_modulus, sup_block_gradient,
)
from supercrit.logging_config import loggers
from supercrit.osgood import fit_constant, gamma_envelope
from supercrit.spectral import (
    SpectralField, biot_savart, dealias, gradient, gradient_sup,
)

logger = loggers['euler']

MIN_DT = 1e-12


class StepperKind(str, Enum):
    RK4 = "rk4"
    SPLIT = "split"


def norm_log(x):
    """Log x = log(e + x), bounded below by 1"""
    return math.log(math.e + x)


@dataclass(frozen=True)
class SolverConfig:
    grid: object
    multiplier: object
    stepper: StepperKind = StepperKind.RK4
    inner_iterations: int = 3
    dt: float = None
    cfl_safety: float = CFL_SAFETY
    t_end: float = 1.0
    cadence: float = 0.1
    s_list: tuple = (0.5,)
    snapshot_every: int = 0
    velocity_sign: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "stepper", StepperKind(self.stepper))
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"CFL safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.t_end > 0:
            raise ValueError(f"tEnd must be positive, got {self.t_end}")
        if not self.cadence > 0:
            raise ValueError(f"cadence must be positive, got {self.cadence}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.inner_iterations < 1:
            raise ValueError(f"split stepper needs >= 1 inner iteration, got {self.inner_iterations}")
        if not self.s_list or any(not 0 < s <= 1 for s in self.s_list):
            raise ValueError(f"tracked exponents must lie in (0, 1], got {self.s_list}")


@dataclass
class DiagnosticRecord:
    t: float
    l2: float
    linf: float
    mean: float
    cs_proxy: dict
    f: dict
    grad_u_inf: float
    lsob_ratio: float
    block_gradient_max: float
    modulus: float

    def row(self, s_list):
        row = {"t": self.t, "L2": self.l2, "Linf": self.linf, "mean": self.mean}
        for s in s_list:
            row[f"Cs_proxy_{s}"] = self.cs_proxy[s]
        row["grad_u_inf"] = self.grad_u_inf
        for s in s_list:
            row[f"f_{s}"] = self.f[s]
        row["lsob_ratio"] = self.lsob_ratio
        row["block_gradient_max"] = self.block_gradient_max
        row["modulus"] = self.modulus
        return row


@dataclass
class DiagnosticSeries:
    s_list: tuple
    records: list = field(default_factory=list)
    blow_up: bool = False
    blow_up_time: float = None
    blow_up_reason: str = ""

    def append(self, record):
        if self.records and record.t <= self.records[-1].t:
            raise ValueError("diagnostic times must be strictly increasing")
        self.records.append(record)

    @property
    def times(self):
        return np.array([r.t for r in self.records])

    def column(self, name, s=None):
        if s is None:
            return np.array([getattr(r, name) for r in self.records])
        return np.array([getattr(r, name)[s] for r in self.records])

    def rows(self):
        return [r.row(self.s_list) for r in self.records]


@dataclass
class RunResult:
    series: DiagnosticSeries
    final: SpectralField
    snapshots: list
    fits: dict
    checks: dict
    wall_clock: float

    @property
    def blow_up(self):
        return self.series.blow_up


class EulerSolver:
    """Owns the spectral operators and LP partition for one configuration"""

    def __init__(self, config):
        self.config = config
        self.grid = config.grid
        self.m = config.multiplier
        self.partition = build_partition(self.grid)
        logger.info(
            f"Euler solver: N={self.grid.N}, L={self.grid.L:.6g}, stepper={config.stepper.value}, "
            f"multiplier=({self.m.describe()})"
        )

    def velocity(self, omega):
        u = biot_savart(omega, self.m)
        if self.config.velocity_sign != 1.0:
            u = u.scaled(self.config.velocity_sign)
        return u

    def _rhs(self, coefficients):
        """Dealiased -u . grad omega in coefficient space with a zero mean mode"""
        omega = SpectralField(self.grid, coefficients=coefficients, name="omega")
        u = self.velocity(omega)
        grad = gradient(omega)
        advection = u.dot(grad)
        rhs = -np.fft.rfft2(advection, axes=(0, 1))
        rhs = np.where(self.grid.dealias_mask, 0.0, rhs)
        rhs[0, 0] = 0.0
        return rhs

    def cfl_dt(self, omega):
        return cfl_limit(self.velocity(omega), self.grid.dx, self.config.cfl_safety)

    def step_rk4(self, omega, dt):
        c = np.array(omega.coefficients)
        k1 = self._rhs(c)
        k2 = self._rhs(c + 0.5 * dt * k1)
        k3 = self._rhs(c + 0.5 * dt * k2)
        k4 = self._rhs(c + dt * k3)
        updated = c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        updated[0, 0] = c[0, 0]
        return self._checked(omega.with_coefficients(updated))

    def step_split_iterate(self, omega, dt):
        """
        Picard iteration: iterate n transports omega over dt by the frozen
        velocity u(iterate n-1), starting from omega itself.
        """
        iterate = omega
        for _ in range(self.config.inner_iterations):
            frozen = self.velocity(iterate)
            iterate = advect(omega, frozen, dt)
        return self._checked(iterate)

    def _checked(self, omega):
        if not omega.is_finite():
            raise BlowUpError("non-finite vorticity")
        return omega

    def step(self, omega, dt):
        """One step of size dt, substepped when dt exceeds the CFL limit"""
        limit = self.cfl_dt(omega)
        dt_sub, count = substeps(dt, limit)
        if count > 1:
            logger.warning(f"dt={dt:.6g} exceeds CFL limit {limit:.6g}; using {count} substeps")
        stepper = self.step_rk4 if self.config.stepper is StepperKind.RK4 else self.step_split_iterate
        for _ in range(count):
            omega = stepper(omega, dt_sub)
        return omega

    def diagnostics(self, omega, t):
        u = self.velocity(omega)
        decomposition = decompose(omega, self.partition)
        proxies = {}
        logs = {}
        for s in self.config.s_list:
            proxy = besov_norms(decomposition, s).cs_proxy
            proxies[s] = proxy
            logs[s] = norm_log(proxy)
        grad_u = gradient_sup(u)
        linf = omega.sup_norm()
        l2 = omega.l2_norm()

        # Right-hand side of the logarithmic Sobolev bound for grad u
        s_ref = self.config.s_list[0]
        q = max(proxies[s_ref] / linf, 1.0) if linf > 0 else 1.0
        rhs = l2 + linf * (1.0 + math.log(q) * self.m.eval(q))
        table = sup_block_gradient(u, self.partition, self.m)
        return DiagnosticRecord(
            t=t,
            l2=l2,
            linf=linf,
            mean=omega.mean,
            cs_proxy=proxies,
            f=logs,
            grad_u_inf=grad_u,
            lsob_ratio=grad_u / rhs if rhs > 0 else 0.0,
            block_gradient_max=max(row["ratio"] for row in table),
            modulus=quasi_lipschitz_modulus(u, self.m),
        )

    def _next_dt(self, omega, remaining, t=None):
        dt = self.config.dt if self.config.dt is not None else self.cfl_dt(omega)
        if dt < MIN_DT:
            raise BlowUpError(f"CFL collapse (dt={dt:.3g})", time=t, last_good=omega)
        return min(dt, remaining)

    def advance(self, omega, t_span):
        """Advance without diagnostics"""
        t = 0.0
        while t < t_span - 1e-14:
            dt = self._next_dt(omega, t_span - t)
            omega = self.step(omega, dt)
            t += dt
        return omega

    def run(self, omega0):
        config = self.config
        started = time.perf_counter()
        omega = dealias(omega0).renamed("omega")
        series = DiagnosticSeries(tuple(config.s_list))
        snapshots = [(0.0, omega)]
        series.append(self.diagnostics(omega, 0.0))

        t = 0.0
        record_index = 0
        try:
            while t < config.t_end - 1e-12:
                target = min(config.cadence * (record_index + 1), config.t_end)
                while t < target - 1e-12:
                    dt = self._next_dt(omega, target - t, t)
                    try:
                        omega = self.step(omega, dt)
                    except BlowUpError as e:
                        raise BlowUpError(str(e), time=t, last_good=omega) from e
                    t = t + dt if target - (t + dt) > 1e-12 else target
                record_index += 1
                series.append(self.diagnostics(omega, t))
                logger.debug(f"t={t:.4f}: L2={series.records[-1].l2:.12g}, grad_u={series.records[-1].grad_u_inf:.6g}")
                if config.snapshot_every and record_index % config.snapshot_every == 0:
                    snapshots.append((t, omega))
        except BlowUpError as e:
            logger.error(f"Blow-up at t={e.time}: {e}", exc_info=True)
            series.blow_up = True
            series.blow_up_time = e.time
            series.blow_up_reason = str(e)
            omega = e.last_good if e.last_good is not None else omega

        if not series.blow_up and snapshots[-1][0] != t:
            snapshots.append((t, omega))
        fits = self.fit_growth(series)
        checks = self.checks(series)
        wall_clock = time.perf_counter() - started
        logger.info(f"Euler run finished at t={t:.6g} in {wall_clock:.2f}s, fits={fits}")
        return RunResult(series, omega, snapshots, fits, checks, wall_clock)

    def fit_growth(self, series):
        """Least constants for f(t) = Log proxy against the r*Gamma(r) envelope"""
        fits = {}
        for s in series.s_list:
            f = series.column("f", s)
            f0 = float(f[0])
            try:
                fits[s] = fit_constant(series.times, f, gamma_envelope(self.m, f0), f0)
            except FitError as e:
                logger.warning(f"Growth fit for s={s} failed: {e}")
                fits[s] = None
        return fits

    def checks(self, series):
        """Measured consistency checks, recorded rather than asserted"""
        times = series.times
        l2 = series.column("l2")
        linf = series.column("linf")
        grad = series.column("grad_u_inf")
        integrals = np.concatenate([[0.0], np.cumsum(np.diff(times) * 0.5 * (grad[1:] + grad[:-1]))])

        bkm = True
        for s in series.s_list:
            log_proxy = np.log(series.column("cs_proxy", s))
            growth = np.diff(log_proxy)
            allowed = 1.1 * np.diff(integrals) + 1e-9
            bkm = bkm and bool(np.all(growth <= allowed))
        return {
            "l2_conservation": bool(np.max(np.abs(l2 - l2[0])) <= 1e-6 * l2[0]),
            "linf_growth": bool(np.max(linf) <= linf[0] * (1 + 1e-3)),
            "bkm": bkm,
            "no_blow_up": not series.blow_up,
        }


def step_rk4(omega, config, dt=None):
    solver = EulerSolver(config)
    return solver.step_rk4(omega, dt if dt is not None else solver.cfl_dt(omega))


def step_split_iterate(omega, config, dt=None):
    solver = EulerSolver(config)
    return solver.step_split_iterate(omega, dt if dt is not None else solver.cfl_dt(omega))


def run(config, omega0):
    return EulerSolver(config).run(omega0)


def reversibility_error(config, omega0, t_span):
    """Advance t_span, flip the velocity sign, return; relative L2 error"""
    forward = EulerSolver(config)
    backward = EulerSolver(replace(config, velocity_sign=-config.velocity_sign))
    start = dealias(omega0)
    there = forward.advance(start, t_span)
    back = backward.advance(there, t_span)
    return (back - start).l2_norm() / start.l2_norm()
