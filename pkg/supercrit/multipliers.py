"""
Radial Fourier symbols m(|xi|) for the slightly supercritical velocity law,
the derived symbol Gamma(s) = m(s)(1 + Log s), and numerical checks of the
structural hypotheses a symbol has to satisfy (monotonicity, doubling,
sub-multiplicativity, logarithmic bound and the Osgood divergence condition).
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from supercrit.config import CLAMP_FLOOR, SAMPLES_PER_DECADE
from supercrit.logging_config import loggers

logger = loggers['multipliers']

MONOTONE_TOLERANCE = 1e-12
OSGOOD_SLOPE_FLOOR = 0.1
OSGOOD_CAUCHY_TOLERANCE = 1e-6


class MultiplierKind(str, Enum):
    CONSTANT = "constant"
    ITERATED_LOG = "iterated_log"
    USER_TABLE = "user_table"


class OsgoodVerdict(str, Enum):
    DIVERGES = "Diverges"
    CONVERGES = "Converges"
    INCONCLUSIVE = "Inconclusive"


def log_grid(lo, hi, per_decade=SAMPLES_PER_DECADE):
    """Log-spaced sample grid from lo to hi with per_decade points per decade"""
    if lo <= 0 or hi <= lo:
        raise ValueError(f"log grid needs 0 < lo < hi, got [{lo}, {hi}]")
    decades = math.log10(hi / lo)
    count = max(int(round(decades * per_decade)) + 1, 2)
    return np.geomspace(lo, hi, count)


class Multiplier(ABC):
    """Abstract radial symbol m(r), frozen below clamp_floor"""

    kind = None

    def __init__(self, clamp_floor=CLAMP_FLOOR):
        if clamp_floor <= 0:
            raise ValueError(f"clampFloor must be positive, got {clamp_floor}")
        self.clamp_floor = float(clamp_floor)
        self._log_floor = math.log(self.clamp_floor)

    @staticmethod
    def create(kind="constant", **params):
        """Factory method building a multiplier from its kind and parameters"""
        kind = MultiplierKind(kind)
        clamp_floor = params.get("clamp_floor", CLAMP_FLOOR)
        if kind is MultiplierKind.CONSTANT:
            return ConstantMultiplier(params.get("constant", 1.0), clamp_floor)
        if kind is MultiplierKind.ITERATED_LOG:
            return IteratedLogMultiplier(params.get("exponents", (1.0,)), clamp_floor)
        if params.get("table_log_r") is not None:
            return TableMultiplier.from_log_table(
                params["table_log_r"], params["table_m"], clamp_floor
            )
        return TableMultiplier(params["table_r"], params["table_m"], clamp_floor)

    @abstractmethod
    def _evaluate_log(self, log_r):
        """Evaluate m at r = exp(log_r) for log_r >= log(clamp_floor)"""

    @property
    def max_log_r(self):
        """Largest Log r at which the symbol is defined"""
        return math.inf

    @property
    def is_constant(self):
        return False

    def eval(self, r):
        """m(max(r, clampFloor)) for scalar or array r >= 0"""
        r = np.asarray(r, dtype=float)
        if not np.all(np.isfinite(r)) or np.any(r < 0):
            raise ValueError("multiplier argument must be finite and non-negative")
        clamped = np.maximum(r, self.clamp_floor)
        values = self._evaluate_log(np.log(clamped))
        return float(values) if values.ndim == 0 else values

    __call__ = eval

    def eval_log(self, log_r):
        """m at r = exp(log_r) without forming r, usable far beyond float range"""
        log_r = np.maximum(np.asarray(log_r, dtype=float), self._log_floor)
        values = self._evaluate_log(log_r)
        return float(values) if values.ndim == 0 else values

    def log_derivative(self, r, step=1e-4):
        """r * m'(r) by a centered difference in Log r; zero on the clamped range"""
        log_r = np.log(np.maximum(np.asarray(r, dtype=float), 1e-300))
        upper = self.eval_log(log_r + step)
        lower = self.eval_log(np.maximum(log_r - step, self._log_floor))
        width = (log_r + step) - np.maximum(log_r - step, self._log_floor)
        derivative = np.where(log_r + step <= self._log_floor, 0.0, (upper - lower) / width)
        return float(derivative) if np.ndim(derivative) == 0 else derivative

    def metadata(self):
        return {"kind": self.kind.value, "clampFloor": self.clamp_floor}

    def describe(self):
        return ", ".join(f"{key}={value}" for key, value in self.metadata().items())


class ConstantMultiplier(Multiplier):
    kind = MultiplierKind.CONSTANT

    def __init__(self, constant=1.0, clamp_floor=CLAMP_FLOOR):
        super().__init__(clamp_floor)
        if constant <= 0:
            raise ValueError(f"constant multiplier must be positive, got {constant}")
        self.constant = float(constant)

    @property
    def is_constant(self):
        return True

    def _evaluate_log(self, log_r):
        return np.full(np.shape(log_r), self.constant)

    def metadata(self):
        return {**super().metadata(), "constant": self.constant}


class IteratedLogMultiplier(Multiplier):
    """
    Product of nested factors Log(1+Log(1+...Log(r^2+1)))^gamma_i, the i-th
    factor carrying i nested outer logarithms.
    """

    kind = MultiplierKind.ITERATED_LOG

    def __init__(self, exponents=(1.0,), clamp_floor=CLAMP_FLOOR):
        super().__init__(clamp_floor)
        self.exponents = tuple(float(g) for g in exponents)
        if not self.exponents:
            raise ValueError("iterated_log needs at least one exponent")
        if any(g < 0 for g in self.exponents):
            raise ValueError(f"exponents must be non-negative, got {self.exponents}")

    def _evaluate_log(self, log_r):
        log_r = np.asarray(log_r, dtype=float)
        # Log(r^2 + 1) written so that it never overflows
        inner = 2.0 * log_r + np.log1p(np.exp(-2.0 * log_r))
        result = np.ones_like(inner)
        for gamma in self.exponents:
            inner = np.log1p(inner)
            if gamma != 0.0:
                result = result * inner ** gamma
        return result

    def metadata(self):
        return {**super().metadata(), "exponents": list(self.exponents)}


class TableMultiplier(Multiplier):
    """Tabulated symbol, interpolated linearly in (Log r, Log m)"""

    kind = MultiplierKind.USER_TABLE

    def __init__(self, table_r, table_m, clamp_floor=CLAMP_FLOOR):
        table_r = np.asarray(table_r, dtype=float)
        if np.any(table_r <= 0):
            raise ValueError("table radii must be positive")
        self._setup(np.log(table_r), table_m, clamp_floor)

    @classmethod
    def from_log_table(cls, table_log_r, table_m, clamp_floor=CLAMP_FLOOR):
        """Table given by natural logarithms of the radii"""
        instance = cls.__new__(cls)
        instance._setup(np.asarray(table_log_r, dtype=float), table_m, clamp_floor)
        return instance

    def _setup(self, log_r, table_m, clamp_floor):
        Multiplier.__init__(self, clamp_floor)
        table_m = np.asarray(table_m, dtype=float)
        if log_r.shape != table_m.shape or log_r.size < 2:
            raise ValueError("user table needs at least two (r, m) pairs of equal length")
        if np.any(np.diff(log_r) <= 0):
            raise ValueError("user table radii must be strictly increasing")
        if np.any(table_m <= 0):
            raise ValueError("user table values must be strictly positive")
        self.log_r = log_r
        self.log_m = np.log(table_m)
        self.table_m = table_m

    @property
    def max_log_r(self):
        return float(self.log_r[-1])

    @property
    def range_text(self):
        return f"[exp({self.log_r[0]:.6g}), exp({self.log_r[-1]:.6g})]"

    def _evaluate_log(self, log_r):
        log_r = np.asarray(log_r, dtype=float)
        tolerance = 1e-12 * max(1.0, abs(self.log_r[-1]))
        if np.any(log_r < self.log_r[0] - tolerance) or np.any(log_r > self.log_r[-1] + tolerance):
            raise ValueError(f"user table queried outside its range r in {self.range_text}")
        return np.exp(np.interp(log_r, self.log_r, self.log_m))

    def is_monotone(self):
        return bool(np.all(np.diff(self.table_m) >= -MONOTONE_TOLERANCE))

    def metadata(self):
        return {**super().metadata(), "tablePoints": int(self.log_r.size), "range": self.range_text}


@dataclass(frozen=True)
class GammaSymbol:
    """Gamma(s) = m(s)(1 + Log s); the logarithm is clamped at s = 1 so Gamma > 0"""

    base: Multiplier

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        values = self.base.eval(np.maximum(s, 0.0)) * (1.0 + np.log(np.maximum(s, 1.0)))
        return float(values) if np.ndim(values) == 0 else values

    def is_monotone(self, grid):
        values = self(grid)
        return bool(np.all(np.diff(values) >= -MONOTONE_TOLERANCE) and np.all(values > 0))


@dataclass
class OsgoodEvidence:
    verdict: OsgoodVerdict
    form: str
    log_upper_limits: list
    integrals: list
    slopes: list = field(default_factory=list)
    diagnostic: str = ""

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "form": self.form,
            "logUpperLimits": self.log_upper_limits,
            "integrals": self.integrals,
            "normalizedSlopes": self.slopes,
            "diagnostic": self.diagnostic,
        }


@dataclass
class HypothesisReport:
    multiplier: dict
    grid_range: tuple
    grid_points: int
    monotone: bool
    positive: bool
    doubling_constant: float
    sub_mult_constant: float
    log_bound_constant: float
    osgood: OsgoodEvidence
    patch_osgood: OsgoodEvidence

    @property
    def osgood_verdict(self):
        return self.osgood.verdict

    def to_dict(self):
        return {
            "multiplier": self.multiplier,
            "gridRange": list(self.grid_range),
            "gridPoints": self.grid_points,
            "monotone": self.monotone,
            "positive": self.positive,
            "doublingConstant": self.doubling_constant,
            "subMultConstant": self.sub_mult_constant,
            "logBoundConstant": self.log_bound_constant,
            "osgoodVerdict": self.osgood.verdict.value,
            "osgood": self.osgood.to_dict(),
            "patchOsgood": self.patch_osgood.to_dict(),
        }


def default_grid(m):
    upper_log = min(math.log(1e12), m.max_log_r)
    return log_grid(m.clamp_floor, math.exp(upper_log))


def default_log_upper_limits(m, count=25):
    upper = min(1e12, m.max_log_r)
    return np.geomspace(math.log(10.0), upper, count)


def check_hypotheses(m, grid=None):
    """Empirical structural constants of m over a log-spaced grid"""
    grid = default_grid(m) if grid is None else np.asarray(grid, dtype=float)
    if grid.size < 100 or math.log10(grid[-1] / grid[0]) < 8:
        raise ValueError("hypothesis grid needs >= 100 points spanning >= 8 decades")

    values = m.eval(grid)
    monotone = bool(np.all(np.diff(values) >= -MONOTONE_TOLERANCE))
    if not monotone:
        raise ValueError(f"multiplier is not non-decreasing on the grid ({m.describe()})")
    positive = bool(np.all(values > 0))

    log_top = m.max_log_r
    doubled = grid[np.log(2.0 * grid) <= log_top]
    doubling = float(np.max(m.eval(2.0 * doubled) / m.eval(doubled)))

    coarse = grid[:: max(grid.size // 96, 1)]
    t1, t2 = np.meshgrid(coarse, coarse, indexing="ij")
    products = np.log(t1) + np.log(t2)
    usable = products <= log_top
    sub_mult = float(np.max(
        m.eval_log(products[usable]) / (m.eval(t1[usable]) + m.eval(t2[usable]))
    ))

    log_bound = float(np.max(values / np.log(grid + 2.0)))

    report = HypothesisReport(
        multiplier=m.metadata(),
        grid_range=(float(grid[0]), float(grid[-1])),
        grid_points=int(grid.size),
        monotone=monotone,
        positive=positive,
        doubling_constant=doubling,
        sub_mult_constant=sub_mult,
        log_bound_constant=log_bound,
        osgood=check_osgood_condition(m),
        patch_osgood=check_osgood_condition(m, form="patch"),
    )
    logger.info(
        f"Hypotheses for {m.describe()}: doubling={doubling:.6g}, "
        f"subMult={sub_mult:.6g}, logBound={log_bound:.6g}, "
        f"osgood={report.osgood_verdict.value}"
    )
    return report


def _osgood_variable(m, form):
    """
    Substitutions turning the Osgood tail integral into int dx / m(e^psi(x)).
    euler: int dt/(t Log t m(t)) with x = LogLog t.
    patch: int dt/(t m(t)(1 + Log t)) with x = Log(1 + Log t).
    """
    if form == "euler":
        return (lambda log_t: math.log(log_t)), (lambda x: math.exp(x))
    if form == "patch":
        return (lambda log_t: math.log1p(log_t)), (lambda x: math.expm1(x))
    raise ValueError(f"unknown Osgood form: {form}")


def check_osgood_condition(m, upper_limits=None, log_upper_limits=None, form="euler"):
    """Tail integrals I(T) from 2 to T and a three-valued divergence verdict"""
    if log_upper_limits is None:
        if upper_limits is None:
            log_upper_limits = default_log_upper_limits(m)
        else:
            log_upper_limits = np.log(np.asarray(upper_limits, dtype=float))
    log_upper_limits = np.asarray(log_upper_limits, dtype=float)
    if log_upper_limits.size < 3:
        raise ValueError("need at least three upper limits")
    if np.any(np.diff(log_upper_limits) <= 0):
        raise ValueError("upper limits must be increasing")
    if log_upper_limits[0] < math.log(10.0) - 1e-12:
        raise ValueError("first upper limit must be >= 10")

    to_x, from_x = _osgood_variable(m, form)
    integrand = lambda x: 1.0 / m.eval_log(from_x(x))

    nodes = [to_x(math.log(2.0))] + [to_x(v) for v in log_upper_limits]
    integrals = []
    running = 0.0
    diagnostic = ""
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        value, error, info = integrate.quad(
            integrand, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200, full_output=1
        )[:3]
        if not math.isfinite(value) or error > 1e-8 * max(1.0, abs(value)):
            diagnostic = f"quadrature did not converge on [{lo:.6g}, {hi:.6g}] (error {error:.3g})"
            logger.warning(f"Osgood check for {m.describe()}: {diagnostic}")
            break
        running += value
        integrals.append(running)

    limits = [float(v) for v in log_upper_limits]
    if diagnostic:
        return OsgoodEvidence(OsgoodVerdict.INCONCLUSIVE, form, limits, integrals, [], diagnostic)

    # Slope of I against LogLog T, scaled by LogLog T: the harmonic borderline
    # 1/x is the slowest decay whose integral still diverges.
    loglog = np.log(log_upper_limits)
    normalized = np.diff(integrals) / np.diff(loglog) * loglog[1:]
    last_increment = integrals[-1] - integrals[-2]

    if np.all(normalized[-2:] >= OSGOOD_SLOPE_FLOOR):
        verdict = OsgoodVerdict.DIVERGES
    elif abs(last_increment) < OSGOOD_CAUCHY_TOLERANCE:
        verdict = OsgoodVerdict.CONVERGES
    else:
        verdict = OsgoodVerdict.INCONCLUSIVE
        diagnostic = (
            f"last increment {last_increment:.3g} above {OSGOOD_CAUCHY_TOLERANCE} "
            f"and normalized slope {normalized[-1]:.3g} below {OSGOOD_SLOPE_FLOOR}"
        )
    logger.info(f"Osgood ({form}) verdict for {m.describe()}: {verdict.value}")
    return OsgoodEvidence(
        verdict, form, limits, [float(v) for v in integrals],
        [float(v) for v in normalized], diagnostic
    )


def check_subadditivity(gamma, grid):
    """Least C with gamma(x + y) <= C (gamma(x) + gamma(y)) over grid pairs"""
    grid = np.asarray(grid, dtype=float)
    x, y = np.meshgrid(grid, grid, indexing="ij")
    return float(np.max(gamma(x + y) / (gamma(x) + gamma(y))))
