"""
Numerical stress tests of the harmonic-analysis inequalities behind the
slightly supercritical theory: the logarithmic Sobolev bound for m(|D|)R g,
the radial kernel of m(|xi|)/|xi|^2 and its derivatives, the commutator
[m(|D|), f] g, and the tangential Holder bound for grad u W with
W = grad-perp phi. Constants are never assumed; every test reports ratios.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from supercrit import bessel
from supercrit.config import KERNEL_GAUSS_ORDER, KERNEL_MAX_INTERVALS
from supercrit.errors import QuadratureError
from supercrit.littlewood_paley import build_partition, decompose, field_norms
from supercrit.logging_config import loggers
from supercrit.multipliers import log_grid
from supercrit.parallel import map_in_threads
from supercrit.patch import ellipse_state, holder_seminorm, patch_velocity
from supercrit.spectral import (
    SpectralField, apply_multiplier, apply_symbol, gradient, perp_gradient,
    riesz_symbol, velocity_gradient,
)

logger = loggers['lab']

AVERAGING_ROUNDS = 12
CONVERGENCE_TOLERANCE = 1e-9
MIN_INTERVALS = 40


@dataclass
class RatioReport:
    name: str
    ratios: list
    seeds: list
    extras: list = field(default_factory=list)

    def __post_init__(self):
        if not all(math.isfinite(r) for r in self.ratios):
            raise ValueError(f"{self.name}: non-finite ratio in report")

    @property
    def max(self):
        return float(np.max(self.ratios))

    @property
    def median(self):
        return float(np.median(self.ratios))

    @property
    def argmax_seed(self):
        return self.seeds[int(np.argmax(self.ratios))]

    def q_trend(self):
        """Log-log regression slope of ratio against Q over unclamped samples"""
        points = [(e["Q"], r) for e, r in zip(self.extras, self.ratios) if e.get("Q", 1.0) > 1.0 and r > 0]
        if len(points) < 3:
            return None
        q, r = np.array(points).T
        return float(np.polyfit(np.log(q), np.log(r), 1)[0])

    def to_dict(self):
        return {
            "name": self.name,
            "count": len(self.ratios),
            "max": self.max,
            "median": self.median,
            "argmaxSeed": self.argmax_seed,
            "qTrend": self.q_trend(),
            "samples": [
                {"seed": s, "ratio": r, **e}
                for s, r, e in zip(self.seeds, self.ratios, self.extras or [{}] * len(self.ratios))
            ],
        }


def refinement_change(coarse, fine):
    """Relative change of the max ratio between two grid resolutions"""
    return abs(fine.max / coarse.max - 1.0)


def merge_reports(name, reports):
    """One report over the samples of several sweeps (e.g. corpora with different slopes)"""
    return RatioReport(
        name,
        [r for report in reports for r in report.ratios],
        [s for report in reports for s in report.seeds],
        [e for report in reports for e in (report.extras or [{}] * len(report.ratios))],
    )


def operator_symbol(grid, operator):
    if operator == "identity":
        return np.ones(grid.spectral_shape)
    if operator.startswith("riesz"):
        i, j = int(operator[-2]), int(operator[-1])
        return riesz_symbol(grid, i, j)
    raise ValueError(f"unknown operator {operator!r}; use identity or riesz<ij>")


@dataclass
class MainInequalityResult:
    ratio: float
    Q: float
    clamped: bool
    cutoff: float

    def to_dict(self):
        return {"Q": self.Q, "clamped": self.clamped, "Ncut": self.cutoff}


def main_inequality_ratio(g, m, s, operator="identity", partition=None):
    """
    ||m(|D|) R g||_inf / (||g||_L2 + ||g||_inf (1 + Log Q m(Q))) with
    Q = ||g||_(C^s cap L2) / ||g||_inf clamped at 1, the C^s cap L2 proxy being
    the Y(s) norm plus the L2 norm; also reports the block cutoff Log2 Q.
    """
    if not 0 < s <= 1:
        raise ValueError(f"s must lie in (0, 1], got {s}")
    sup = g.sup_norm()
    if sup == 0:
        raise ValueError("main inequality needs a nonzero field")
    partition = partition or build_partition(g.grid)
    f = apply_symbol(apply_multiplier(g, m), operator_symbol(g.grid, operator))
    q = field_norms(g, partition, s).cs_proxy / sup
    clamped = q < 1.0
    if clamped:
        logger.warning(f"Q={q:.4g} < 1 clamped to 1")
        q = 1.0
    rhs = g.l2_norm() + sup * (1.0 + math.log(q) * m.eval(q))
    return MainInequalityResult(f.sup_norm() / rhs, q, bool(clamped), math.log2(q))


def main_inequality_sweep(grid, m, s, operator, corpus, threads=1):
    partition = build_partition(grid)

    def evaluate(index):
        sample = corpus.sample(grid, index)
        return main_inequality_ratio(sample, m, s, operator, partition)

    results = map_in_threads(evaluate, range(corpus.count), threads)
    report = RatioReport(
        f"main inequality ({operator}, s={s}, N={grid.N})",
        [r.ratio for r in results],
        [corpus.seed + i for i in range(corpus.count)],
        [r.to_dict() for r in results],
    )
    logger.info(f"{report.name}: max={report.max:.6g}, median={report.median:.6g}")
    return report


def commutator(f, g, m):
    """f m(|D|) g - m(|D|)(f g)"""
    return f * apply_multiplier(g, m) - apply_multiplier(f * g, m)


def weighted_block_sup(field_, partition, weight):
    """sup_j weight(j) ||Delta_j field||_inf"""
    decomposition = decompose(field_, partition)
    return max(weight(j) * decomposition.block(j).sup_norm() for j in partition.indices)


def commutator_ratio(f, g, m, mu, partition=None):
    """
    sup_j 2^(j mu) m(2^j)^-1 ||Delta_j [m(|D|), f] g||_inf divided by
    sup_j 2^(j mu) ||Delta_j g||_inf ||grad f||_inf.
    """
    if not 0 < mu <= 1:
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    partition = partition or build_partition(f.grid)
    grad_f = float(np.max(gradient(f).magnitude()))
    g_norm = weighted_block_sup(g, partition, lambda j: 2.0 ** (j * mu))
    denominator = g_norm * grad_f
    if denominator == 0:
        raise ValueError("commutator denominator is zero (grad f = 0 or g constant)")
    numerator = weighted_block_sup(
        commutator(f, g, m), partition, lambda j: 2.0 ** (j * mu) / m.eval(2.0 ** j)
    )
    return numerator / denominator


def commutator_sweep(grid, m, mu, f_corpus, g_corpus, threads=1):
    if 8 * f_corpus.cutoff >= grid.N:
        raise ValueError(f"f corpus cutoff {f_corpus.cutoff} must lie below N/8")
    partition = build_partition(grid)

    def evaluate(index):
        return commutator_ratio(f_corpus.sample(grid, index), g_corpus.sample(grid, index), m, mu, partition)

    count = min(f_corpus.count, g_corpus.count)
    ratios = map_in_threads(evaluate, range(count), threads)
    report = RatioReport(
        f"commutator (mu={mu}, N={grid.N})", list(ratios),
        [g_corpus.seed + i for i in range(count)],
        [{"fSeed": f_corpus.seed + i} for i in range(count)],
    )
    logger.info(f"{report.name}: max={report.max:.6g}")
    return report


def tangential_holder_ratio(state, m, sigma, partition=None, seed=0):
    """
    sup_j 2^(j sigma) m(2^j)^-1 ||Delta_j (grad u W)||_inf / ((1 + Log Delta_sigma) |W|_sigma)
    with W = grad-perp phi; Delta and |W|_sigma are band Holder estimates.
    """
    partition = partition or build_partition(state.grid)
    band = state.band()
    W = perp_gradient(state.phi)
    holder = holder_seminorm([W.u1, W.u2], band, sigma, seed=seed).seminorm
    grad_inf = float(np.min(W.magnitude()[band]))
    delta = holder / grad_inf
    if state.a0 == 0:
        return {"ratio": 0.0, "Delta": delta, "W_holder": holder, "numerator": 0.0}
    A = velocity_gradient(patch_velocity(state, m))
    weight = lambda j: 2.0 ** (j * sigma) / m.eval(2.0 ** j)
    numerator = 0.0
    for i in range(2):
        component = A[i, 0] * W.u1.values + A[i, 1] * W.u2.values
        numerator = max(numerator, weighted_block_sup(SpectralField(state.grid, values=component), partition, weight))
    ratio = numerator / ((1.0 + math.log(max(delta, 1.0))) * holder)
    return {"ratio": ratio, "Delta": delta, "W_holder": holder, "numerator": numerator}


def tangential_holder_sweep(grid, m, aspects, sigma, a0=1.0, radius=0.5, threads=1, seed=0):
    partition = build_partition(grid)

    def evaluate(aspect):
        row = tangential_holder_ratio(ellipse_state(grid, aspect, a0, radius), m, sigma, partition, seed)
        return {"aspect": aspect, **row}

    rows = map_in_threads(evaluate, aspects, threads)
    logger.info(f"Tangential Holder ratios over aspects {list(aspects)}: {[r['ratio'] for r in rows]}")
    return rows


# Radial kernel of m(|xi|)/|xi|^2 in the plane

def _gauss_panels(breakpoints, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    a, b = breakpoints[:-1], breakpoints[1:]
    half = 0.5 * (b - a)
    points = 0.5 * (a + b)[:, None] + half[:, None] * nodes[None, :]
    return points, half[:, None] * weights[None, :]


def oscillatory_integral(integrand, nu, start=0.0, kinks=(), order=KERNEL_GAUSS_ORDER,
                         max_intervals=KERNEL_MAX_INTERVALS):
    """
    int_start^inf J_nu(2 pi s) h(s) ds with integrand(s) = J_nu(2 pi s) h(s),
    summed between consecutive zeros of J_nu(2 pi s) and accelerated by
    repeated averaging of the partial sums.
    """
    all_zeros = bessel.zeros(nu, max_intervals + 64) / (2.0 * math.pi)
    zeros = all_zeros[all_zeros > start][:max_intervals]
    extra = [k for k in kinks if start < k < zeros[-1]]
    breakpoints = np.unique(np.concatenate([[start], zeros, extra]))
    points, weights = _gauss_panels(breakpoints, order)
    pieces = np.sum(weights * integrand(points), axis=1)
    cumulative = np.cumsum(pieces)
    at_zero = np.isin(breakpoints[1:], zeros)
    partial_sums = cumulative[at_zero]

    previous = None
    for count in range(MIN_INTERVALS, len(partial_sums) + 1, 10):
        estimate = _averaged(partial_sums[:count])
        if previous is not None and abs(estimate - previous) <= CONVERGENCE_TOLERANCE * max(1.0, abs(estimate)):
            return estimate
        previous = estimate
    raise QuadratureError(
        f"oscillatory quadrature not converged after {len(partial_sums)} zero intervals",
        partial_sums=list(map(float, partial_sums)),
    )


def _averaged(partial_sums, rounds=AVERAGING_ROUNDS):
    values = np.asarray(partial_sums, dtype=float)
    for _ in range(min(rounds, len(values) - 1)):
        values = 0.5 * (values[:-1] + values[1:])
    return float(values[-1])


@dataclass
class KernelRow:
    rho: float
    fhat: float
    fhat_prime: float
    fhat_second: float
    majorant: float

    def to_dict(self):
        return {
            "rho": self.rho, "fhat": self.fhat, "fhat_prime": self.fhat_prime,
            "fhat_second": self.fhat_second, "majorant_ratio": self.majorant,
        }


def kernel_derivatives(m, rho, order=KERNEL_GAUSS_ORDER):
    """
    f'(rho) = -(1/rho) int J1(2 pi s) m(s/rho) ds and
    f''(rho) = -f'(rho)/rho + rho^-2 int J1(2 pi s) (r m'(r))|_{r=s/rho} ds.
    """
    kink = (m.clamp_floor * rho,)
    first = oscillatory_integral(lambda s: bessel.j1(2 * math.pi * s) * m.eval(s / rho), 1, 0.0, kink, order)
    fprime = -first / rho
    if m.is_constant:
        correction = 0.0
    else:
        correction = oscillatory_integral(
            lambda s: bessel.j1(2 * math.pi * s) * m.log_derivative(s / rho), 1, 0.0, kink, order
        )
    fsecond = -fprime / rho + correction / rho ** 2
    return fprime, fsecond


def kernel_value(m, rho, order=KERNEL_GAUSS_ORDER, panels=64):
    """
    Renormalized f(rho) = (1/2 pi)[int_0^1 (J0(2 pi rho r) - 1) m(r)/r dr
    + int_rho^inf J0(2 pi s) m(s/rho)/s ds].
    """
    breakpoints = np.linspace(0.0, 1.0, panels + 1)
    points, weights = _gauss_panels(breakpoints, order)
    near = float(np.sum(weights * (bessel.j0(2 * math.pi * rho * points) - 1.0) * m.eval(points) / points))
    far = oscillatory_integral(
        lambda s: bessel.j0(2 * math.pi * s) * m.eval(s / rho) / s, 0, rho,
        (m.clamp_floor * rho,), order,
    )
    return (near + far) / (2.0 * math.pi)


def compute_radial_kernel(m, rhos, order=KERNEL_GAUSS_ORDER):
    """Kernel table over rho in [1e-3, 1] with the majorant rho^2 |f''| / (1 + m(1/rho))"""
    rhos = np.asarray(rhos, dtype=float)
    if np.any(rhos < 1e-3 - 1e-15) or np.any(rhos > 1.0 + 1e-15):
        raise ValueError("kernel radii must lie in [1e-3, 1]")
    rows = []
    for rho in rhos:
        fprime, fsecond = kernel_derivatives(m, rho, order)
        rows.append(KernelRow(
            float(rho), kernel_value(m, rho, order), fprime, fsecond,
            rho ** 2 * abs(fsecond) / (1.0 + m.eval(1.0 / rho)),
        ))
    logger.info(f"Kernel table for {m.describe()}: max majorant {max(r.majorant for r in rows):.6g}")
    return rows


def kernel_summary(rows, rows_refined=None):
    majorants = np.array([r.majorant for r in rows])
    rhos = np.array([r.rho for r in rows])
    slope = float(np.polyfit(np.log(rhos), [r.fhat for r in rows], 1)[0])
    index = int(np.argmax(majorants))
    summary = {
        "majorantSup": float(majorants.max()),
        "argmaxRho": float(rhos[index]),
        "interiorMax": 0 < index < len(rows) - 1,
        "logSlope": slope,
    }
    if rows_refined is not None:
        refined = max(r.majorant for r in rows_refined)
        summary["refinementChange"] = abs(refined / summary["majorantSup"] - 1.0)
    return summary


def default_rho_grid(count=16):
    return log_grid(1e-3, 1.0, per_decade=max(count // 3, 2))
