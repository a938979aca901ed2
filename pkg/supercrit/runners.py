"""Mode runners: each executes one validated scenario and writes its bundle"""

import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from supercrit.config import TORUS_NOTICE
from supercrit.errors import EnvelopeRangeError
from supercrit.euler import EulerSolver, SolverConfig
from supercrit.fields import (
    FieldCorpus, circle_level_set, gaussian_vortex, random_field, single_mode, vortex_pair,
)
from supercrit.inequalities import (
    commutator_ratio, commutator_sweep, compute_radial_kernel, kernel_summary, main_inequality_sweep,
    merge_reports, refinement_change, tangential_holder_sweep,
)
from supercrit.littlewood_paley import besov_norms, build_partition, decompose
from supercrit.logging_config import loggers
from supercrit.multipliers import (
    ConstantMultiplier, check_hypotheses, check_osgood_condition, log_grid,
)
from supercrit.osgood import (
    OsgoodEnvelope, check_two_term_hypothesis, envelope, gamma_envelope, osgood_two_term,
    patch_envelope, two_term_envelope,
)
from supercrit.patch import (
    PatchConfig, PatchSolver, PatchState, aspect_sweep, boundary_displacement, ellipse_state, sweep_spread,
)
from supercrit.reporting import build_report, write_csv, write_json, write_resolved_env
from supercrit.snapshots import write_snapshot

logger = loggers['cli']

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOW_UP = 3
EXIT_CHECK_FAILED = 4

FIT_CEILING = 1e3
SWEEP_SPREAD_LIMIT = 10.0
COMMUTATOR_ZERO = 1e-12
# Seed offset separating the f corpus from the g corpus in commutator sweeps
F_SEED_OFFSET = 1_000_003
SLOPE_SEED_STRIDE = 10_007


@dataclass
class ModeResult:
    payload: dict
    checks: dict
    blow_up: bool = False


@dataclass
class ScenarioOutcome:
    report: dict
    exit_code: int
    output_dir: Path

    @property
    def status(self):
        return {EXIT_OK: "ok", EXIT_BLOW_UP: "blow-up", EXIT_CHECK_FAILED: "check-failed"}.get(self.exit_code, "error")


def hypotheses_summary(m):
    """Hypothesis report for the run's multiplier, or the reason it could not be computed"""
    try:
        return check_hypotheses(m).to_dict()
    except ValueError as e:
        logger.warning(f"Hypothesis check skipped for {m.describe()}: {e}")
        return {"error": str(e)}


def initial_vorticity(scenario, grid):
    kind = scenario["initial.kind"]
    amplitude = scenario["initial.amplitude"]
    if kind == "single_mode":
        return single_mode(grid, tuple(scenario["initial.k"]), amplitude)
    if kind == "gaussian":
        return gaussian_vortex(grid, radius=scenario["initial.radius"], amplitude=amplitude)
    if kind == "vortex_pair":
        return vortex_pair(grid, scenario["initial.separation"], scenario["initial.radius"], amplitude)
    return random_field(grid, scenario.seed, scenario["initial.cutoff"], scenario["initial.slope"], amplitude)


def run_euler(scenario, out):
    grid = scenario.grid()
    m = scenario.multiplier()
    config = SolverConfig(
        grid=grid,
        multiplier=m,
        stepper=scenario["solver.stepper"],
        inner_iterations=scenario["solver.inner_iterations"],
        dt=scenario["time.dt"],
        cfl_safety=scenario["time.cfl_safety"],
        t_end=scenario["time.end"],
        cadence=scenario["time.cadence"],
        s_list=tuple(scenario["diagnostics.s"]),
        snapshot_every=scenario["output.snapshot_every"],
    )
    solver = EulerSolver(config)
    result = solver.run(initial_vorticity(scenario, grid))
    series = result.series
    write_csv(out / "diagnostics.csv", series.rows())

    block_rows = []
    for label, field_ in (("initial", result.snapshots[0][1]), ("final", result.final)):
        decomposition = decompose(field_, solver.partition)
        for s in series.s_list:
            for row in besov_norms(decomposition, s).per_block:
                block_rows.append({"state": label, "s": s, **row})
    write_csv(out / "blocks.csv", block_rows)

    envelope_rows = []
    envelopes = {}
    for s, constant in result.fits.items():
        if constant is None:
            continue
        f = series.column("f", s)
        f0 = float(f[0])
        curve = envelope(gamma_envelope(m, f0), f0, constant, series.times, truncate=True)
        envelopes[s] = curve.to_dict()
        for t, measured, bound in zip(series.times, f, curve.bound):
            envelope_rows.append({"s": s, "t": t, "measured": measured, "bound": bound})
    if envelope_rows:
        write_csv(out / "envelope.csv", envelope_rows)

    for index, (t, field_) in enumerate(result.snapshots):
        write_snapshot(out / f"omega_{index:04d}.field", field_, {
            **m.metadata(), "t": repr(float(t)), "notice": TORUS_NOTICE,
        })

    checks = dict(result.checks)
    checks["fit_finite"] = all(c is not None and c <= FIT_CEILING for c in result.fits.values())
    payload = {
        "multiplier": m.metadata(),
        "hypotheses": hypotheses_summary(m),
        "fits": result.fits,
        "envelopes": envelopes,
        "checks": checks,
        "blowUp": {"flag": series.blow_up, "time": series.blow_up_time, "reason": series.blow_up_reason},
        "records": len(series.records),
        "solverWallClock": result.wall_clock,
    }
    return ModeResult(payload, checks, series.blow_up)


def initial_patch(scenario, grid):
    a0 = scenario["patch.a0"]
    if scenario["patch.shape"] == "circle":
        return PatchState(circle_level_set(grid, scenario["patch.radius"]), a0).validate()
    return ellipse_state(grid, scenario["patch.aspect"], a0, scenario["patch.radius"], scenario["patch.angle"])


def run_patch(scenario, out):
    grid = scenario.grid()
    m = scenario.multiplier()
    mu_list = tuple(scenario["patch.mu"])
    config = PatchConfig(
        multiplier=m,
        a0=scenario["patch.a0"],
        stepper=scenario["patch.stepper"],
        dt=scenario["time.dt"],
        cfl_safety=scenario["time.cfl_safety"],
        t_end=scenario["time.end"],
        cadence=scenario["time.cadence"],
        mu_list=mu_list,
        eps=scenario["patch.eps"],
        pair_budget=scenario["patch.pair_budget"],
        seed=scenario.seed,
        renormalize=scenario["patch.renormalize"],
        arc_distances=tuple(scenario["patch.arc_distances"]),
        arc_rhos=tuple(scenario["patch.arc_rhos"]),
        arc_mu=scenario["patch.arc_mu"],
    )
    state0 = initial_patch(scenario, grid)
    result = PatchSolver(config, grid).run(state0)
    write_csv(out / "diagnostics.csv", result.rows(mu_list))
    if result.arc_rows:
        write_csv(out / "arcs.csv", result.arc_rows)

    two_term = result.fits.get("two_term")
    if two_term is not None:
        f = np.array([1.0 + math.log(max(r.delta[mu_list[0]], 1.0)) for r in result.records])
        curve = osgood_two_term(two_term_envelope(m), float(f[0]), two_term, result.times, truncate=True)
        write_csv(out / "envelope.csv", [
            {"t": t, "measured": value, "bound": bound} for t, value, bound in zip(result.times, f, curve.bound)
        ])

    displacement = boundary_displacement(state0, result.final)
    checks = dict(result.checks)
    checks["boundary_stationary"] = displacement < 2.0

    sweep, spread = [], None
    aspects = tuple(scenario["patch.aspects"])
    if aspects:
        mu = mu_list[0]
        tangential = aspect_sweep(grid, m, aspects, config.a0, mu, scenario["patch.radius"], scenario.threads, scenario.seed)
        holder = tangential_holder_sweep(
            grid, m, aspects, mu, config.a0, scenario["patch.radius"], scenario.threads, scenario.seed
        )
        for row, holder_row in zip(tangential, holder):
            sweep.append({**row, "holder_ratio": holder_row["ratio"], "W_holder": holder_row["W_holder"]})
        write_csv(out / "aspect_sweep.csv", sweep)
        spread = sweep_spread(sweep)
        checks["tangential_bounded"] = spread.bounded(SWEEP_SPREAD_LIMIT)

    final = result.records[-1]
    payload = {
        "multiplier": m.metadata(),
        "hypotheses": hypotheses_summary(m),
        "fits": result.fits,
        "losingBound": result.losing,
        "V_T": final.V,
        "mu_T": final.mu_t,
        "boundaryDisplacementCells": displacement,
        "aspectSweep": sweep,
        "aspectSpread": spread.to_dict() if spread else None,
        "checks": checks,
        "blowUp": {"flag": result.blow_up, "time": result.blow_up_time, "reason": result.blow_up_reason},
        "solverWallClock": result.wall_clock,
    }
    return ModeResult(payload, checks, result.blow_up)


def _ratio_rows(report):
    return report.to_dict()["samples"]


def run_lab_inequality(scenario, out):
    grid = scenario.grid()
    m = scenario.multiplier()
    s, operator, threads = scenario["lab.s"], scenario["lab.operator"], scenario.threads
    corpus = FieldCorpus(
        scenario.seed, scenario["corpus.count"], scenario["corpus.cutoff"], scenario["corpus.slope"],
        scenario["corpus.cutoff_min"],
    )
    report = main_inequality_sweep(grid, m, s, operator, corpus, threads)
    write_csv(out / "ratios.csv", _ratio_rows(report))
    payload = {"multiplier": m.metadata(), "hypotheses": hypotheses_summary(m), "main": report.to_dict()}
    checks = {}

    if scenario["lab.refine"]:
        fine = main_inequality_sweep(scenario.grid(2 * grid.N), m, s, operator, corpus, threads)
        write_csv(out / "ratios_refined.csv", _ratio_rows(fine))
        change = refinement_change(report, fine)
        payload["refined"] = fine.to_dict()
        payload["refinementChange"] = change
        checks["refinement_stable"] = change <= scenario["lab.refine_limit"]

    reports = [report]
    for index, slope in enumerate(scenario["corpus.slopes"], start=1):
        tilted = replace(corpus, seed=scenario.seed + index * SLOPE_SEED_STRIDE, slope=slope)
        reports.append(main_inequality_sweep(grid, m, s, operator, tilted, threads))
    merged = merge_reports(f"main inequality Q-trend (N={grid.N})", reports)
    trend = merged.q_trend()
    write_csv(out / "q_trend.csv", _ratio_rows(merged))
    q = [e["Q"] for e in merged.extras]
    payload["qTrend"] = {
        "slope": trend,
        "samples": len(merged.ratios),
        "max": merged.max,
        "qMin": min(q),
        "qMax": max(q),
        "clamped": sum(e["clamped"] for e in merged.extras),
    }
    # the ratio may decay with Q; only an upward trend fails
    checks["no_q_trend"] = trend is not None and trend < scenario["lab.q_trend_limit"]

    payload["checks"] = checks
    return ModeResult(payload, checks)


def run_lab_kernel(scenario, out):
    m = scenario.multiplier()
    rhos = log_grid(scenario["kernel.rho_min"], scenario["kernel.rho_max"], scenario["kernel.per_decade"])
    order = scenario["kernel.order"]
    rows = compute_radial_kernel(m, rhos, order)
    write_csv(out / "kernel.csv", [row.to_dict() for row in rows])
    refined = None
    if scenario["kernel.refine"]:
        refined = compute_radial_kernel(m, rhos, 2 * order)
        write_csv(out / "kernel_refined.csv", [row.to_dict() for row in refined])
    summary = kernel_summary(rows, refined)
    checks = {"majorant_finite": math.isfinite(summary["majorantSup"])}
    if refined is not None:
        checks["refinement_stable"] = summary["refinementChange"] <= scenario["kernel.refine_limit"]
    payload = {
        "multiplier": m.metadata(),
        "hypotheses": hypotheses_summary(m),
        "kernel": summary,
        "checks": checks,
    }
    return ModeResult(payload, checks)


def run_lab_commutator(scenario, out):
    grid = scenario.grid()
    m = scenario.multiplier()
    mu, threads = scenario["lab.mu"], scenario.threads
    count, cutoff, slope = scenario["corpus.count"], scenario["corpus.cutoff"], scenario["corpus.slope"]
    g_corpus = FieldCorpus(scenario.seed, count, cutoff, slope)
    f_corpus = FieldCorpus(scenario.seed + F_SEED_OFFSET, count, scenario["commutator.f_cutoff"],
                           scenario["commutator.f_slope"])
    report = commutator_sweep(grid, m, mu, f_corpus, g_corpus, threads)
    write_csv(out / "ratios.csv", _ratio_rows(report))

    partition = build_partition(grid)
    constant = ConstantMultiplier(2.0)
    constant_max = max(
        commutator_ratio(f_corpus.sample(grid, i), g_corpus.sample(grid, i), constant, mu, partition)
        for i in range(min(count, 3))
    )
    checks = {"zero_for_constant": constant_max <= COMMUTATOR_ZERO}
    payload = {
        "multiplier": m.metadata(),
        "hypotheses": hypotheses_summary(m),
        "commutator": report.to_dict(),
        "constantMultiplierMax": constant_max,
    }
    if scenario["lab.refine"]:
        fine = commutator_sweep(scenario.grid(2 * grid.N), m, mu, f_corpus, g_corpus, threads)
        write_csv(out / "ratios_refined.csv", _ratio_rows(fine))
        change = refinement_change(report, fine)
        payload["refined"] = fine.to_dict()
        payload["refinementChange"] = change
        checks["refinement_stable"] = change <= scenario["lab.refine_limit"]
    payload["checks"] = checks
    return ModeResult(payload, checks)


def build_envelope(family, m, f0):
    if family == "gamma":
        return gamma_envelope(m, f0)
    if family == "patch":
        return patch_envelope(m, f0)
    if family == "two_term":
        return two_term_envelope(m, lower_limit=min(0.5, f0 / 2.0))
    return OsgoodEnvelope(lambda r: r, lower_limit=min(1.0, f0 / 2.0), name="r")


def run_osgood_table(scenario, out):
    m = scenario.multiplier()
    family, f0, constant = scenario["envelope.family"], scenario["envelope.f0"], scenario["envelope.C"]
    env = build_envelope(family, m, f0)
    t_grid = np.linspace(0.0, scenario["envelope.t_end"], scenario["envelope.points"])
    curve_of = envelope if scenario["envelope.kind"] == "linear" else osgood_two_term
    curve = curve_of(env, f0, constant, t_grid, truncate=True)
    write_csv(out / "envelope.csv", curve.rows())

    stride = max(len(env.log_r) // 512, 1)
    write_csv(out / "h_table.csv", [
        {"log_r": x, "H": h} for x, h in zip(env.log_r[::stride], env.H[::stride])
    ])

    osgood = check_osgood_condition(m)
    patch_osgood = check_osgood_condition(m, form="patch")
    write_csv(out / "osgood.csv", [
        {"form": evidence.form, "log_T": log_t, "integral": value}
        for evidence in (osgood, patch_osgood)
        for log_t, value in zip(evidence.log_upper_limits, evidence.integrals)
    ])
    payload = {
        "multiplier": m.metadata(),
        "envelope": curve.to_dict(),
        "osgood": osgood.to_dict(),
        "patchOsgood": patch_osgood.to_dict(),
    }
    if family == "two_term":
        try:
            payload["subadditivity"] = check_two_term_hypothesis(env.gamma).to_dict()
        except (ValueError, EnvelopeRangeError) as e:
            payload["subadditivity"] = {"error": str(e)}
    checks = {"finite_on_grid": curve.exhausted_at is None}
    payload["checks"] = checks
    return ModeResult(payload, checks)


def run_hypotheses(scenario, out):
    m = scenario.multiplier()
    report = check_hypotheses(m)
    rows = []
    for evidence in (report.osgood, report.patch_osgood):
        slopes = [None] + list(evidence.slopes)
        for log_t, value, slope in zip(evidence.log_upper_limits, evidence.integrals, slopes):
            rows.append({"form": evidence.form, "log_T": log_t, "integral": value, "normalized_slope": slope})
    write_csv(out / "osgood.csv", rows)

    payload = {"hypotheses": report.to_dict()}
    try:
        payload["subadditivity"] = check_two_term_hypothesis(lambda r: (1.0 + r) * m.eval_log(r)).to_dict()
    except ValueError as e:
        payload["subadditivity"] = {"error": str(e)}
    checks = {}
    expected = scenario["hypotheses.expect"]
    if expected is not None:
        checks["expected_verdict"] = report.osgood_verdict.value == expected
    payload["checks"] = checks
    return ModeResult(payload, checks)


RUNNERS = {
    "euler": run_euler,
    "patch": run_patch,
    "lab-inequality": run_lab_inequality,
    "lab-kernel": run_lab_kernel,
    "lab-commutator": run_lab_commutator,
    "osgood-table": run_osgood_table,
    "hypotheses": run_hypotheses,
}


def exit_code_for(scenario, result):
    if result.blow_up:
        return EXIT_BLOW_UP
    failed = [check for check in scenario.enforce if not result.checks.get(check, False)]
    if failed:
        logger.warning(f"Scenario {scenario.name}: enforced checks failed: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run_scenario(scenario):
    """Execute a validated scenario; writes resolved.env, CSVs and report.json"""
    out = scenario.output_dir
    out.mkdir(parents=True, exist_ok=True)
    write_resolved_env(out / "resolved.env", scenario.resolved())
    started = time.perf_counter()
    logger.info(f"Running scenario {scenario.name} (mode={scenario.mode}, seed={scenario.seed}) into {out}")
    result = RUNNERS[scenario.mode](scenario, out)
    exit_code = exit_code_for(scenario, result)
    wall_clock = time.perf_counter() - started
    report = build_report(scenario, result.payload, exit_code, wall_clock)
    report["enforced"] = list(scenario.enforce)
    write_json(out / "report.json", report)
    logger.info(f"Scenario {scenario.name} finished with exit code {exit_code} in {wall_clock:.2f}s")
    return ScenarioOutcome(report, exit_code, out)
