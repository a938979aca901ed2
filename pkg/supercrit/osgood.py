"""
Osgood envelope calculus: tabulated H(r) = int_a^r dr'/gamma(r'), its inverse,
growth envelopes f(t) <= H^-1(H(f0) + C t f0), the two-term variant
H^-1(H(f0) + C(t^2 + t)), and least-constant fits of measured series.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from supercrit.config import ENVELOPE_MAX_LOG10, ENVELOPE_POINTS_PER_DECADE
from supercrit.errors import EnvelopeRangeError, FitError
from supercrit.logging_config import loggers
from supercrit.multipliers import GammaSymbol, check_subadditivity, log_grid

logger = loggers['osgood']

FIT_BRACKET = (1e-6, 1e6)
FIT_RELATIVE_TOLERANCE = 1e-4
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


class OsgoodEnvelope:
    """
    H tabulated on a log grid in r. Between nodes H and H^-1 are cubic Hermite
    interpolants using the exact slopes dH/dLog r = r/gamma(r).
    """

    def __init__(self, gamma, lower_limit=1.0, name="gamma",
                 points_per_decade=ENVELOPE_POINTS_PER_DECADE, max_log10=ENVELOPE_MAX_LOG10):
        if lower_limit <= 0:
            raise ValueError(f"envelope lower limit must be positive, got {lower_limit}")
        self.gamma = gamma
        self.lower_limit = float(lower_limit)
        self.name = name

        x_lo = math.log(self.lower_limit)
        x_hi = max_log10 * math.log(10.0)
        if x_hi <= x_lo:
            raise ValueError("envelope table range is empty")
        count = int(math.ceil((x_hi - x_lo) / math.log(10.0) * points_per_decade)) + 1
        x = np.linspace(x_lo, x_hi, count)

        slopes = self._log_integrand(x)
        half = 0.5 * np.diff(x)
        middle = 0.5 * (x[1:] + x[:-1])
        samples = middle[:, None] + half[:, None] * GAUSS_NODES[None, :]
        pieces = half * np.sum(GAUSS_WEIGHTS[None, :] * self._log_integrand(samples), axis=1)
        H = np.concatenate([[0.0], np.cumsum(pieces)])
        if np.any(np.diff(H) <= 0):
            raise ValueError(f"H is not strictly increasing for {name}")

        self.log_r = x
        self.H = H
        self._forward = CubicHermiteSpline(x, H, slopes)
        self._inverse = CubicHermiteSpline(H, x, 1.0 / slopes)
        logger.info(
            f"Tabulated envelope {name}: {count} points, lower limit {self.lower_limit:.6g}, "
            f"H range [0, {H[-1]:.6g}]"
        )

    def _log_integrand(self, x):
        r = np.exp(x)
        values = np.asarray(self.gamma(r), dtype=float)
        if np.any(~np.isfinite(values)) or np.any(values <= 0):
            raise ValueError(f"gamma must be finite and positive on the table ({self.name})")
        return r / values

    @property
    def h_max(self):
        return float(self.H[-1])

    @property
    def r_max(self):
        return float(np.exp(self.log_r[-1]))

    def h(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.lower_limit * (1 - 1e-12)):
            raise ValueError(f"H evaluated below the lower limit {self.lower_limit}")
        if np.any(r > self.r_max):
            raise EnvelopeRangeError(f"envelope blow-up beyond tabulated range (r > {self.r_max:.3g})")
        values = self._forward(np.log(r))
        return float(values) if values.ndim == 0 else values

    def h_inverse(self, y, truncate=False):
        """
        H^-1(y). Beyond the table this raises EnvelopeRangeError, or with
        truncate=True returns +inf for those entries.
        """
        y = np.asarray(y, dtype=float)
        beyond = y > self.h_max
        if np.any(beyond) and not truncate:
            raise EnvelopeRangeError(
                f"envelope blow-up beyond tabulated range (H argument {float(np.max(y)):.6g} > {self.h_max:.6g})"
            )
        clipped = np.clip(y, 0.0, self.h_max)
        values = np.where(beyond, np.inf, np.exp(self._inverse(clipped)))
        return float(values) if values.ndim == 0 else values


@dataclass
class EnvelopeCurve:
    name: str
    t: np.ndarray
    bound: np.ndarray
    f0: float
    constant: float
    kind: str = "linear"
    exhausted_at: float = None

    def rows(self):
        return [{"t": float(t), "bound": float(b)} for t, b in zip(self.t, self.bound)]

    def to_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "f0": self.f0,
            "C": self.constant,
            "exhaustedAt": self.exhausted_at,
        }


def _validate_start(env, f0):
    if f0 <= env.lower_limit:
        raise ValueError(f"f0={f0} must exceed the envelope lower limit {env.lower_limit}")


def _curve(env, f0, constant, t_grid, growth, kind, truncate):
    _validate_start(env, f0)
    t_grid = np.asarray(t_grid, dtype=float)
    argument = env.h(f0) + constant * growth(t_grid)
    bound = env.h_inverse(argument, truncate=truncate)
    bound = np.atleast_1d(bound)
    bound = np.where(t_grid == 0, f0, bound)
    exhausted = t_grid[~np.isfinite(bound)]
    return EnvelopeCurve(
        env.name, t_grid, bound, f0, constant, kind,
        float(exhausted[0]) if exhausted.size else None,
    )


def envelope(env, f0, constant, t_grid, truncate=False):
    """f(t) <= H^-1(H(f0) + C t f0)"""
    return _curve(env, f0, constant, t_grid, lambda t: t * f0, "linear", truncate)


def osgood_two_term(env, f0, constant, t_grid, truncate=False):
    """f(t) <= H^-1(H(f0) + C (t^2 + t))"""
    return _curve(env, f0, constant, t_grid, lambda t: t * t + t, "two-term", truncate)


def fit_constant(t_grid, measured, env, f0, kind="linear"):
    """Least C in [1e-6, 1e6] for which the envelope dominates the measured series"""
    t_grid = np.asarray(t_grid, dtype=float)
    measured = np.asarray(measured, dtype=float)
    if not np.all(np.isfinite(measured)):
        raise ValueError("measured series must be finite")
    if measured[0] > f0 * (1 + 1e-6):
        raise ValueError(f"measured(0)={measured[0]} exceeds f0={f0}")
    curve = envelope if kind == "linear" else osgood_two_term

    def dominates(constant):
        bound = curve(env, f0, constant, t_grid, truncate=True).bound
        return bool(np.all(bound >= measured - 1e-12 * np.abs(measured)))

    lo, hi = FIT_BRACKET
    if dominates(lo):
        logger.info(f"Fit for {env.name}: data dominated at bracket bottom C={lo}")
        return lo
    if not dominates(hi):
        raise FitError("envelope family cannot dominate data")
    while hi / lo > 1 + FIT_RELATIVE_TOLERANCE:
        middle = math.sqrt(lo * hi)
        if dominates(middle):
            hi = middle
        else:
            lo = middle
    logger.info(f"Fitted constant for {env.name} ({kind}): C={hi:.6g}")
    return hi


def gamma_envelope(m, f0):
    """Envelope for Log of the C^s norm: gamma(r) = r Gamma(r)"""
    big_gamma = GammaSymbol(m)
    lower = min(1.0, f0 / 2.0)
    return OsgoodEnvelope(lambda r: r * big_gamma(r), lower_limit=lower, name="r*Gamma(r)")


def patch_envelope(m, f0):
    """Envelope for the patch gradient: H(r) = int dr/(r m(r)(1 + Log r)) from 2"""
    big_gamma = GammaSymbol(m)
    lower = min(2.0, f0 / 2.0)
    return OsgoodEnvelope(lambda r: r * big_gamma(r), lower_limit=lower, name="r*m(r)*(1+Log r)")


def two_term_envelope(m, lower_limit=0.5):
    """gamma~(r) = (1 + r) m(e^r), the growth law for 1 + Log Delta"""
    return OsgoodEnvelope(
        lambda r: (1.0 + r) * m.eval_log(r), lower_limit=lower_limit, name="(1+r)*m(e^r)"
    )


@dataclass
class SubadditivityCheck:
    constant: float
    grid_range: tuple = field(default=(0.5, 1e6))

    def to_dict(self):
        return {"subadditivityConstant": self.constant, "gridRange": list(self.grid_range)}


def check_two_term_hypothesis(gamma, lower=0.5, upper=1e6):
    """Least C with gamma(x + y) <= C(gamma(x) + gamma(y)) on log-spaced pairs"""
    grid = log_grid(lower, upper, per_decade=16)
    constant = check_subadditivity(gamma, grid)
    if not math.isfinite(constant):
        raise ValueError("two-term growth law fails the subadditivity check")
    return SubadditivityCheck(constant, (lower, upper))


def losing_bound(grad0_mu, V_T, eps, m, constant=1.0):
    """2 |grad phi0|_mu exp[(C/eps) m(e^V) V] at the final time"""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    exponent = (constant / eps) * m.eval_log(V_T) * V_T
    try:
        return 2.0 * grad0_mu * math.exp(exponent)
    except OverflowError:
        return math.inf
