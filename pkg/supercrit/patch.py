"""
Level-set evolution of the modified vortex patch problem and its boundary
diagnostics: |grad phi|_inf, Holder seminorms |grad phi|_mu, Delta_mu, the
tangential velocity gradient <grad u tau, tau>, arc-measure tables and the
losing-estimate bookkeeping mu_t = mu - eps V(t)/V(T).

The patch E = {phi > 0} carries vorticity a0; the velocity comes from the
mollified indicator a0 H_eps(phi) through the same spectral Biot-Savart path
as the Euler solver.
"""

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from supercrit.advection import advect, cfl_limit, substeps
from supercrit.config import BAND_CELLS, CFL_SAFETY, PAIR_BUDGET, SMOOTH_CELLS
from supercrit.errors import BlowUpError, FitError
from supercrit.fields import ellipse_level_set
from supercrit.littlewood_paley import build_partition, field_norms
from supercrit.logging_config import loggers
from supercrit.multipliers import ConstantMultiplier
from supercrit.osgood import (
    fit_constant, losing_bound, patch_envelope, two_term_envelope,
)
from supercrit.parallel import map_in_threads
from supercrit.spectral import (
    SpectralField, VectorField, biot_savart, gradient, interpolate_periodic, perp_gradient,
    velocity_gradient,
)

logger = loggers['patch']

MARGIN_FRACTION = 1.0 / 8.0
GRAD_FLOOR_FRACTION = 1e-2
# share of the band gradient sup below which a sweep member counts as degenerate
DEGENERATE_FRACTION = 3e-2
PROJECTION_ITERATIONS = 6


class PatchStepper(str, Enum):
    RK4 = "rk4"
    SEMI_LAGRANGIAN = "semi_lagrangian"


def smoothed_heaviside(phi, eps):
    """0 below -eps, 1 above eps, C^1 sine ramp in between"""
    ratio = np.clip(phi / eps, -1.0, 1.0)
    return 0.5 * (1.0 + ratio + np.sin(math.pi * ratio) / math.pi)


@dataclass(frozen=True)
class PatchState:
    phi: SpectralField
    a0: float
    t: float = 0.0
    band_cells: float = BAND_CELLS
    smooth_cells: float = SMOOTH_CELLS

    @property
    def grid(self):
        return self.phi.grid

    @property
    def band_width(self):
        return self.band_cells * self.grid.dx

    @property
    def smooth_width(self):
        return self.smooth_cells * self.grid.dx

    def band(self):
        """Points within band_width of the zero set by the first-order distance |phi| / |grad phi|"""
        return np.abs(self.phi.values) < self.band_width * gradient(self.phi).magnitude()

    def inside(self):
        return self.phi.values > 0

    def area(self):
        return float(np.sum(smoothed_heaviside(self.phi.values, self.smooth_width)) * self.grid.cell_area)

    def centroid(self):
        x1, x2 = self.grid.coordinates
        mask = self.inside()
        return float(np.mean(x1[mask])), float(np.mean(x2[mask]))

    def indicator(self):
        values = self.a0 * smoothed_heaviside(self.phi.values, self.smooth_width)
        return SpectralField(self.grid, values=values, name="omega")

    def validate(self):
        mask = self.inside()
        if not np.any(mask):
            raise ValueError("patch is empty (phi > 0 nowhere)")
        x1, x2 = self.grid.coordinates
        lo = MARGIN_FRACTION * self.grid.L
        hi = self.grid.L - lo
        if (x1[mask].min() < lo or x1[mask].max() > hi
                or x2[mask].min() < lo or x2[mask].max() > hi):
            raise ValueError("patch touching domain margin")
        return self

    def with_phi(self, phi, t):
        return PatchState(phi, self.a0, t, self.band_cells, self.smooth_cells)


def patch_velocity(state, m):
    """Modified Biot-Savart velocity of the mollified patch indicator"""
    state.validate()
    return biot_savart(state.indicator(), m)


@dataclass(frozen=True)
class TangentField:
    t1: np.ndarray
    t2: np.ndarray
    mask: np.ndarray


def tangent_field(state):
    """tau = grad-perp phi / |grad-perp phi| on the band, NaN off the band"""
    perp = perp_gradient(state.phi)
    norm = perp.magnitude()
    mask = state.band() & (norm > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(mask, perp.u1.values / norm, np.nan)
        t2 = np.where(mask, perp.u2.values / norm, np.nan)
    return TangentField(t1, t2, mask)


@dataclass
class HolderEstimate:
    seminorm: float
    lp_proxy: float
    pairs: int


def holder_seminorm(fields, band, mu, pair_budget=PAIR_BUDGET, seed=0, partition=None):
    """
    sup |f(x) - f(y)| / |x - y|^mu over sampled band pairs with grid offsets in
    dyadic length ranges [l, 2l) cells; fields may be a scalar or a list of
    components (Euclidean difference norm). Half the pairs at each scale use
    axis-aligned offsets of exactly l cells.
    """
    if not 0 < mu <= 1:
        raise ValueError(f"Holder exponent must lie in (0, 1], got {mu}")
    fields = fields if isinstance(fields, (list, tuple)) else [fields]
    grid = fields[0].grid
    points = np.argwhere(band)
    if len(points) < 100:
        raise ValueError(f"band has {len(points)} sample points, need at least 100")

    rng = np.random.default_rng(seed)
    stacked = np.stack([np.asarray(f.values) for f in fields])
    scales = []
    size = 1
    while size <= grid.N // 16:
        scales.append(size)
        size *= 2
    per_scale = max(pair_budget // len(scales), 16)

    best = 0.0
    used = 0
    for size in scales:
        half = per_scale // 2
        axis_angles = rng.integers(0, 4, half) * (math.pi / 2.0)
        angles = np.concatenate([axis_angles, rng.uniform(0.0, 2.0 * math.pi, per_scale - half)])
        lengths = np.concatenate([np.full(half, float(size)), rng.uniform(size, 2 * size, per_scale - half)])
        offsets = np.rint(np.stack([lengths * np.cos(angles), lengths * np.sin(angles)], axis=-1)).astype(int)
        offsets = offsets[np.any(offsets != 0, axis=1)]
        starts = points[rng.integers(0, len(points), len(offsets))]
        ends = (starts + offsets) % grid.N
        keep = band[ends[:, 0], ends[:, 1]]
        if not np.any(keep):
            continue
        starts, ends, offsets = starts[keep], ends[keep], offsets[keep]
        diff = stacked[:, starts[:, 0], starts[:, 1]] - stacked[:, ends[:, 0], ends[:, 1]]
        distance = np.hypot(offsets[:, 0], offsets[:, 1]) * grid.dx
        quotients = np.sqrt(np.sum(diff ** 2, axis=0)) / distance ** mu
        best = max(best, float(np.max(quotients)))
        used += len(quotients)

    lp_proxy = None
    if partition is not None:
        lp_proxy = max(field_norms(f, partition, mu).y_norm for f in fields)
    return HolderEstimate(best, lp_proxy, used)


@dataclass
class TangentialEstimate:
    tangential_sup: float
    delta: float
    ratio: float
    grad_u_band_sup: float


def tangential_gradient_sup(state, u, m, delta):
    """sup over the band of |<grad u tau, tau>| and its ratio to 1 + m(Delta) Log Delta"""
    tau = tangent_field(state)
    A = velocity_gradient(u)
    band = tau.mask
    t1, t2 = tau.t1[band], tau.t2[band]
    contraction = (t1 * A[0, 0][band] * t1 + t1 * A[0, 1][band] * t2
                   + t2 * A[1, 0][band] * t1 + t2 * A[1, 1][band] * t2)
    tangential = float(np.max(np.abs(contraction))) if contraction.size else 0.0
    frobenius = np.sqrt(np.sum(A ** 2, axis=(0, 1)))[band]
    band_sup = float(np.max(frobenius)) if frobenius.size else 0.0
    normalizer = 1.0 + m.eval(delta) * math.log(max(delta, 1.0))
    return TangentialEstimate(tangential, delta, tangential / normalizer, band_sup)


def project_to_boundary(state, x0):
    """Newton projection of x0 onto {phi = 0} using interpolated phi and grad phi"""
    grad = gradient(state.phi)

    def sample(point):
        at = point[None, :]
        value = float(interpolate_periodic(state.phi, at)[0])
        g = np.array([float(interpolate_periodic(grad.u1, at)[0]), float(interpolate_periodic(grad.u2, at)[0])])
        return value, g

    point = np.array(x0, dtype=float)
    value, g = sample(point)
    if abs(value) >= state.band_width * np.linalg.norm(g):
        raise ValueError("no boundary point within the band of x0")
    for _ in range(PROJECTION_ITERATIONS):
        norm2 = float(g @ g)
        if norm2 == 0:
            raise ValueError("grad phi vanishes near x0")
        point = point - value * g / norm2
        value, g = sample(point)
    return point, g / np.linalg.norm(g)


@dataclass
class ArcRow:
    rho: float
    measure: float
    bound: float
    distance: float
    within_window: bool

    def to_dict(self):
        return {
            "rho": self.rho, "measure": self.measure, "bound": self.bound,
            "d": self.distance, "within_window": self.within_window,
        }


def arc_bound(distance, rho, mu):
    return 2.0 * math.pi * ((1.0 + 2.0 ** mu) * distance / rho + 2.0 ** mu * (rho / mu) ** mu)


def arc_measure(state, x0, rhos, mu=1.0, delta=None, samples=4096):
    """
    Arc measure of the symmetric difference between {z : x0 + rho z in E} and
    the half circle {z : n . z >= 0}, n the inward normal at the boundary
    point nearest x0, for each rho in rhos.
    """
    boundary, normal = project_to_boundary(state, x0)
    distance = float(np.linalg.norm(np.asarray(x0, dtype=float) - boundary))
    window = None
    if delta is not None and delta > 0:
        window = (1.0 / (2.0 * delta)) ** (1.0 / mu)
        if distance >= window:
            logger.warning(f"x0 at distance {distance:.4g} lies outside the window delta={window:.4g}")

    angles = 2.0 * math.pi * np.arange(samples) / samples
    z = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    half_circle = z @ normal >= 0
    rows = []
    for rho in rhos:
        if rho < distance:
            raise ValueError(f"rho={rho} is smaller than d(x0)={distance:.4g}")
        inside = interpolate_periodic(state.phi, np.asarray(x0)[None, :] + rho * z) > 0
        measure = 2.0 * math.pi * np.count_nonzero(inside ^ half_circle) / samples
        rows.append(ArcRow(
            float(rho), float(measure), arc_bound(distance, rho, mu), distance,
            True if window is None else distance < window,
        ))
    return rows


def boundary_point_along(state, center, direction):
    """First zero of phi on the ray center + s * direction, by bisection"""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    center = np.asarray(center, dtype=float)
    lo, hi = 0.0, state.grid.L / 2.0
    value_at = lambda s: float(interpolate_periodic(state.phi, (center + s * direction)[None, :])[0])
    if value_at(lo) <= 0:
        raise ValueError("ray origin lies outside the patch")
    step = state.grid.dx
    s = step
    while s < hi and value_at(s) > 0:
        s += step
    lo, hi = s - step, s
    for _ in range(60):
        middle = 0.5 * (lo + hi)
        if value_at(middle) > 0:
            lo = middle
        else:
            hi = middle
    return center + 0.5 * (lo + hi) * direction


@dataclass(frozen=True)
class PatchConfig:
    multiplier: object
    a0: float = 1.0
    stepper: PatchStepper = PatchStepper.RK4
    dt: float = None
    cfl_safety: float = CFL_SAFETY
    t_end: float = 1.0
    cadence: float = 0.1
    mu_list: tuple = (0.5,)
    eps: float = 0.1
    pair_budget: int = PAIR_BUDGET
    seed: int = 0
    renormalize: bool = False
    arc_distances: tuple = ()
    arc_rhos: tuple = ()
    arc_mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "stepper", PatchStepper(self.stepper))
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"CFL safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.t_end > 0 or not self.cadence > 0:
            raise ValueError("tEnd and cadence must be positive")
        if not self.mu_list or any(not 0 < mu <= 1 for mu in self.mu_list):
            raise ValueError(f"mu values must lie in (0, 1], got {self.mu_list}")
        if not 0 < self.eps < min(self.mu_list):
            raise ValueError(f"eps must lie in (0, min mu), got {self.eps}")


@dataclass
class PatchRecord:
    t: float
    area: float
    grad_inf: float
    grad_sup: float
    grad_holder: dict
    delta: dict
    tangential_sup: float
    tangential_ratio: float
    grad_u_band_sup: float
    classical_grad_band_sup: float
    classical_ratio: float
    V: float = 0.0
    mu_t: dict = field(default_factory=dict)

    def row(self, mu_list):
        row = {"t": self.t, "area": self.area, "grad_inf": self.grad_inf, "grad_sup": self.grad_sup}
        for mu in mu_list:
            row[f"grad_holder_{mu}"] = self.grad_holder[mu]
            row[f"Delta_{mu}"] = self.delta[mu]
        row.update({
            "tangential_sup": self.tangential_sup,
            "tangential_ratio": self.tangential_ratio,
            "grad_u_band_sup": self.grad_u_band_sup,
            "classical_grad_band_sup": self.classical_grad_band_sup,
            "classical_ratio": self.classical_ratio,
            "V": self.V,
        })
        for mu in mu_list:
            row[f"mu_t_{mu}"] = self.mu_t.get(mu, mu)
        return row


@dataclass
class PatchRunResult:
    records: list
    final: PatchState
    arc_rows: list
    fits: dict
    checks: dict
    losing: dict
    wall_clock: float
    blow_up: bool = False
    blow_up_time: float = None
    blow_up_reason: str = ""

    @property
    def times(self):
        return np.array([r.t for r in self.records])

    def column(self, name, key=None):
        if key is None:
            return np.array([getattr(r, name) for r in self.records])
        return np.array([getattr(r, name)[key] for r in self.records])

    def rows(self, mu_list):
        return [r.row(mu_list) for r in self.records]


class PatchSolver:
    def __init__(self, config, grid):
        self.config = config
        self.grid = grid
        self.m = config.multiplier
        self.classical = ConstantMultiplier(1.0)
        self.partition = build_partition(grid)
        self.grad_floor = None
        logger.info(
            f"Patch solver: N={grid.N}, a0={config.a0}, stepper={config.stepper.value}, "
            f"multiplier=({self.m.describe()}), band={BAND_CELLS} cells, smoothing={SMOOTH_CELLS} cells"
        )

    def velocity(self, state):
        return patch_velocity(state, self.m)

    def _rhs(self, state, coefficients):
        phi = SpectralField(self.grid, coefficients=coefficients, name="phi")
        u = self.velocity(state.with_phi(phi, state.t))
        transport = u.dot(gradient(phi))
        rhs = -np.fft.rfft2(transport, axes=(0, 1))
        return np.where(self.grid.dealias_mask, 0.0, rhs)

    def step_rk4(self, state, dt):
        c = np.array(state.phi.coefficients)
        k1 = self._rhs(state, c)
        k2 = self._rhs(state, c + 0.5 * dt * k1)
        k3 = self._rhs(state, c + 0.5 * dt * k2)
        k4 = self._rhs(state, c + dt * k3)
        updated = c + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return state.with_phi(state.phi.with_coefficients(updated), state.t + dt)

    def step_semi_lagrangian(self, state, dt):
        u_now = self.velocity(state)
        predicted = state.with_phi(advect(state.phi, u_now, dt), state.t + dt)
        u_next = self.velocity(predicted)
        centred = VectorField((u_now.u1 + u_next.u1) * 0.5, (u_now.u2 + u_next.u2) * 0.5)
        return state.with_phi(advect(state.phi, centred, dt), state.t + dt)

    def evolve(self, state, dt):
        """One step of size dt (substepped beyond the CFL limit)"""
        if state.a0 == 0:
            return state.with_phi(state.phi, state.t + dt)
        limit = cfl_limit(self.velocity(state), self.grid.dx, self.config.cfl_safety)
        dt_sub, count = substeps(dt, limit)
        if count > 1:
            logger.warning(f"dt={dt:.6g} exceeds CFL limit {limit:.6g}; using {count} substeps")
        stepper = self.step_rk4 if self.config.stepper is PatchStepper.RK4 else self.step_semi_lagrangian
        for _ in range(count):
            state = stepper(state, dt_sub)
            if not state.phi.is_finite():
                raise BlowUpError("non-finite level set", time=state.t)
        if self.config.renormalize:
            state = renormalize(state)
        return state

    def diagnostics(self, state):
        band = state.band()
        grad = gradient(state.phi)
        grad_norm = grad.magnitude()
        grad_inf = float(np.min(grad_norm[band]))
        if self.grad_floor is None:
            self.grad_floor = GRAD_FLOOR_FRACTION * grad_inf
        if grad_inf < self.grad_floor:
            raise BlowUpError("patch regularity lost", time=state.t, last_good=state)

        holders = {}
        deltas = {}
        for mu in self.config.mu_list:
            try:
                estimate = holder_seminorm(
                    [grad.u1, grad.u2], band, mu, self.config.pair_budget, self.config.seed
                )
            except ValueError as e:
                raise BlowUpError(f"patch band collapsed: {e}", time=state.t, last_good=state) from e
            holders[mu] = estimate.seminorm
            deltas[mu] = estimate.seminorm / grad_inf

        delta = deltas[self.config.mu_list[0]]
        if state.a0 == 0:
            tangential = TangentialEstimate(0.0, delta, 0.0, 0.0)
            classical_sup = 0.0
        else:
            u = self.velocity(state)
            tangential = tangential_gradient_sup(state, u, self.m, delta)
            classical = biot_savart(state.indicator(), self.classical)
            classical_sup = tangential_gradient_sup(state, classical, self.classical, delta).grad_u_band_sup
        return PatchRecord(
            t=state.t,
            area=state.area(),
            grad_inf=grad_inf,
            grad_sup=float(np.max(grad_norm)),
            grad_holder=holders,
            delta=deltas,
            tangential_sup=tangential.tangential_sup,
            tangential_ratio=tangential.ratio,
            grad_u_band_sup=tangential.grad_u_band_sup,
            classical_grad_band_sup=classical_sup,
            classical_ratio=classical_sup / (1.0 + math.log1p(delta)),
        )

    def arc_tables(self, state, record):
        config = self.config
        if not config.arc_distances or not config.arc_rhos:
            return []
        center = state.centroid()
        boundary = boundary_point_along(state, center, (1.0, 0.0))
        inward = np.asarray(center) - boundary
        inward = inward / np.linalg.norm(inward)
        rows = []
        for index, d in enumerate(config.arc_distances):
            x0 = boundary + d * inward
            rhos = [rho for rho in config.arc_rhos if rho >= d]
            delta = record.delta[config.mu_list[0]]
            for row in arc_measure(state, x0, rhos, config.arc_mu, delta):
                rows.append({"t": state.t, "x0_index": index, **row.to_dict()})
        return rows

    def run(self, state0):
        config = self.config
        started = time.perf_counter()
        state = state0.validate()
        self.grad_floor = None
        records = [self.diagnostics(state)]
        arc_rows = self.arc_tables(state, records[0])
        blow_up, blow_up_time, reason = False, None, ""
        record_index = 0
        try:
            while state.t < config.t_end - 1e-12:
                target = min(config.cadence * (record_index + 1), config.t_end)
                while state.t < target - 1e-12:
                    dt = config.dt
                    if dt is None:
                        dt = cfl_limit(self.velocity(state), self.grid.dx, config.cfl_safety)
                    dt = min(dt, target - state.t)
                    state = self.evolve(state, dt)
                    if target - state.t <= 1e-12:
                        state = state.with_phi(state.phi, target)
                record_index += 1
                records.append(self.diagnostics(state))
                logger.debug(f"t={state.t:.4f}: area={records[-1].area:.8g}, Delta={records[-1].delta}")
        except BlowUpError as e:
            logger.error(f"Patch run stopped at t={state.t:.6g}: {e}", exc_info=True)
            blow_up, blow_up_time, reason = True, state.t, str(e)

        if not blow_up:
            arc_rows.extend(self.arc_tables(state, records[-1]))
        accumulate_losing(records, config.mu_list, config.eps)
        fits = self.fit_growth(records)
        checks = self.checks(records)
        V_T = records[-1].V
        losing = {
            mu: losing_bound(records[0].grad_holder[mu], V_T, config.eps, self.m)
            for mu in config.mu_list
        }
        wall_clock = time.perf_counter() - started
        logger.info(f"Patch run finished at t={state.t:.6g} in {wall_clock:.2f}s; checks={checks}")
        return PatchRunResult(records, state, arc_rows, fits, checks, losing, wall_clock,
                              blow_up, blow_up_time, reason)

    def fit_growth(self, records):
        times = np.array([r.t for r in records])
        fits = {}
        mu = self.config.mu_list[0]
        f = np.array([1.0 + math.log(max(r.delta[mu], 1.0)) for r in records])
        try:
            fits["two_term"] = fit_constant(times, f, two_term_envelope(self.m), float(f[0]), kind="two-term")
        except FitError as e:
            logger.warning(f"Two-term fit failed: {e}")
            fits["two_term"] = None
        grad_sup = np.array([r.grad_sup for r in records])
        g0 = float(grad_sup[0])
        try:
            env = patch_envelope(self.m, g0)
            fits["grad_sup"] = fit_constant(times, grad_sup, env, g0)
        except (FitError, ValueError) as e:
            logger.warning(f"Gradient envelope fit failed: {e}")
            fits["grad_sup"] = None
        return fits

    def checks(self, records):
        times = np.array([r.t for r in records])
        area = np.array([r.area for r in records])
        grad_inf = np.array([r.grad_inf for r in records])
        tangential = np.array([r.tangential_sup for r in records])
        integral = np.concatenate([[0.0], np.cumsum(np.diff(times) * 0.5 * (tangential[1:] + tangential[:-1]))])
        decay = np.log(grad_inf[0]) - np.log(grad_inf)
        final_mu = records[-1].mu_t
        return {
            "area_conservation": bool(np.max(np.abs(area - area[0])) <= 1e-3 * area[0]),
            "grad_inf_tracking": bool(np.all(decay <= 1.1 * integral + 1e-9)),
            "losing_exponent": all(final_mu[mu] == mu - self.config.eps for mu in self.config.mu_list),
        }


def accumulate_losing(records, mu_list, eps):
    """V(t) = int_0^t (1 + Log Delta) ds by trapezoid and mu_t = mu - eps V(t)/V(T)"""
    mu_ref = mu_list[0]
    growth = [1.0 + math.log(max(r.delta[mu_ref], 1.0)) for r in records]
    V = 0.0
    records[0].V = 0.0
    for previous, current, g0, g1 in zip(records[:-1], records[1:], growth[:-1], growth[1:]):
        V += 0.5 * (g0 + g1) * (current.t - previous.t)
        current.V = V
    V_T = records[-1].V
    for record in records:
        scale = record.V / V_T if V_T > 0 else 0.0
        record.mu_t = {mu: mu - eps * scale for mu in mu_list}
    return V_T


def renormalize(state):
    """Rescale phi so that |grad phi| averages to 1 on the band; the zero set is unchanged"""
    band = state.band()
    mean_grad = float(np.mean(gradient(state.phi).magnitude()[band]))
    if mean_grad <= 0:
        return state
    return state.with_phi(state.phi * (1.0 / mean_grad), state.t)


def boundary_displacement(initial, final):
    """Largest normal shift of the zero set in grid cells, |phi_T - phi_0| / |grad phi_0| next to {phi_0 = 0}"""
    near = np.abs(initial.phi.values) < 2.0 * initial.grid.dx
    grad = gradient(initial.phi).magnitude()[near]
    shift = np.abs(final.phi.values - initial.phi.values)[near] / grad
    return float(np.max(shift)) / initial.grid.dx


def evolve(state, m, dt, stepper=PatchStepper.RK4):
    solver = PatchSolver(PatchConfig(multiplier=m, a0=state.a0, stepper=stepper), state.grid)
    return solver.evolve(state, dt)


def ellipse_state(grid, aspect, a0=1.0, radius=0.5, angle=0.0):
    """Area-preserving ellipse with semi-axes radius*sqrt(aspect) and radius/sqrt(aspect)"""
    root = math.sqrt(aspect)
    phi = ellipse_level_set(grid, radius * root, radius / root, angle)
    return PatchState(phi, a0).validate()


def aspect_sweep(grid, m, aspects, a0=1.0, mu=0.5, radius=0.5, threads=1, seed=0):
    """Tangential and full band gradient sups over a family of ellipses"""

    def evaluate(aspect):
        state = ellipse_state(grid, aspect, a0, radius)
        band = state.band()
        grad = gradient(state.phi)
        grad_inf = float(np.min(grad.magnitude()[band]))
        holder = holder_seminorm([grad.u1, grad.u2], band, mu, seed=seed).seminorm
        delta = holder / grad_inf
        estimate = tangential_gradient_sup(state, patch_velocity(state, m), m, delta)
        return {
            "aspect": aspect,
            "Delta": delta,
            "tangential_sup": estimate.tangential_sup,
            "ratio": estimate.ratio,
            "grad_u_band_sup": estimate.grad_u_band_sup,
        }

    rows = map_in_threads(evaluate, aspects, threads)
    logger.info(f"Aspect sweep over {list(aspects)}: ratios {[round(r['ratio'], 6) for r in rows]}")
    return rows


@dataclass
class SweepSpread:
    spread: float
    degenerate: list
    band_growth: float

    def bounded(self, limit):
        """Tangential ratios within limit of each other while the full band gradient grows"""
        return self.spread <= limit and self.band_growth > 1.0

    def to_dict(self):
        return {"spread": self.spread, "degenerate": self.degenerate, "bandGrowth": self.band_growth}


def sweep_spread(rows, fraction=DEGENERATE_FRACTION):
    """
    Max/min tangential ratio of an aspect sweep over its non-degenerate members.
    A circle has no tangential derivative of the velocity at all, so its ratio
    sits at the discretization floor and is left out of the spread.
    """
    live = [row for row in rows if row["tangential_sup"] >= fraction * row["grad_u_band_sup"]]
    degenerate = [row["aspect"] for row in rows if row not in live]
    ratios = [row["ratio"] for row in live]
    if not ratios:
        spread = 1.0
    elif min(ratios) <= 0:
        spread = math.inf
    else:
        spread = max(ratios) / min(ratios)
    first, last = rows[0]["grad_u_band_sup"], rows[-1]["grad_u_band_sup"]
    growth = last / first if first > 0 else math.inf
    return SweepSpread(spread, degenerate, growth)
