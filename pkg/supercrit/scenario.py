"""
Scenario files: flat key=value lines with dotted sections, read with
dotenv_values and coerced by a typed schema. Resolution order is schema
default < scenario file < command-line override. Validation never allocates
fields or runs numerics.
"""

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import dotenv_values

from supercrit.config import (
    CFL_SAFETY, CLAMP_FLOOR, DEFAULT_THREADS, KERNEL_GAUSS_ORDER, OUTPUT_DIR, PAIR_BUDGET,
    SCENARIO_DIR,
)
from supercrit.errors import ConfigError
from supercrit.logging_config import loggers
from supercrit.multipliers import Multiplier, MultiplierKind, OsgoodVerdict
from supercrit.spectral import Grid

logger = loggers['cli']

MODES = ("euler", "patch", "lab-inequality", "lab-kernel", "lab-commutator", "osgood-table", "hypotheses")
GRID_MODES = ("euler", "patch", "lab-inequality", "lab-commutator")
CORPUS_MODES = ("lab-inequality", "lab-commutator")
TIME_MODES = ("euler", "patch")
REFINE_MODES = ("lab-inequality", "lab-commutator")

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class Option:
    key: str
    kind: str
    default: object = None
    modes: tuple = ()
    choices: tuple = ()
    help: str = ""

    def applies_to(self, mode):
        return not self.modes or mode in self.modes


SCHEMA = [
    Option("mode", "str", None, (), MODES, "what to run"),
    Option("name", "str", None, (), (), "scenario name (defaults to the file stem)"),
    Option("description", "str", "", (), (), "one-line description shown by list"),
    Option("seed", "int", None, (), (), "generator seed; required for corpus modes"),
    Option("threads", "int", DEFAULT_THREADS, (), (), "worker threads for sweeps"),
    Option("output.dir", "str", None, (), (), "output directory (default runs/<name>)"),
    Option("report.enforce", "strs", (), (), (), "checks that must pass (exit 4 otherwise)"),

    Option("grid.N", "int", None, GRID_MODES, (), "grid points per side, power of two"),
    Option("domain.L", "float", 2.0 * math.pi, GRID_MODES, (), "torus period"),

    Option("multiplier.kind", "str", "constant", (), tuple(k.value for k in MultiplierKind)),
    Option("multiplier.constant", "float", 1.0),
    Option("multiplier.exponents", "floats", (1.0,), (), (), "one exponent per iterated log factor"),
    Option("multiplier.table_r", "floats", ()),
    Option("multiplier.table_log_r", "floats", ()),
    Option("multiplier.table_m", "floats", ()),
    Option("multiplier.clamp_floor", "float", CLAMP_FLOOR),

    Option("time.end", "float", 1.0, TIME_MODES),
    Option("time.cadence", "float", 0.1, TIME_MODES),
    Option("time.dt", "float", None, TIME_MODES, (), "fixed step; CFL-adaptive when unset"),
    Option("time.cfl_safety", "float", CFL_SAFETY, TIME_MODES),

    Option("solver.stepper", "str", "rk4", ("euler",), ("rk4", "split")),
    Option("solver.inner_iterations", "int", 3, ("euler",)),
    Option("diagnostics.s", "floats", (0.5,), ("euler",), (), "tracked Holder exponents"),
    Option("output.snapshot_every", "int", 0, ("euler",), (), "snapshot every n records (0: first and last)"),
    Option("initial.kind", "str", "vortex_pair", ("euler",), ("single_mode", "gaussian", "vortex_pair", "random")),
    Option("initial.k", "ints", (1, 0), ("euler",)),
    Option("initial.radius", "float", 0.3, ("euler",)),
    Option("initial.separation", "float", 1.0, ("euler",)),
    Option("initial.amplitude", "float", 1.0, ("euler",)),
    Option("initial.cutoff", "int", 8, ("euler",)),
    Option("initial.slope", "float", 3.0, ("euler",)),

    Option("patch.shape", "str", "circle", ("patch",), ("circle", "ellipse")),
    Option("patch.radius", "float", 0.5, ("patch",)),
    Option("patch.aspect", "float", 2.0, ("patch",)),
    Option("patch.angle", "float", 0.0, ("patch",)),
    Option("patch.a0", "float", 1.0, ("patch",)),
    Option("patch.stepper", "str", "rk4", ("patch",), ("rk4", "semi_lagrangian")),
    Option("patch.mu", "floats", (0.5,), ("patch",)),
    Option("patch.eps", "float", 0.1, ("patch",)),
    Option("patch.pair_budget", "int", PAIR_BUDGET, ("patch",)),
    Option("patch.renormalize", "bool", False, ("patch",)),
    Option("patch.arc_distances", "floats", (), ("patch",)),
    Option("patch.arc_rhos", "floats", (), ("patch",)),
    Option("patch.arc_mu", "float", 1.0, ("patch",)),
    Option("patch.aspects", "floats", (), ("patch",), (), "ellipse aspect sweep for the tangential bounds"),

    Option("corpus.count", "int", 100, CORPUS_MODES),
    Option("corpus.cutoff", "int", 16, CORPUS_MODES),
    Option("corpus.slope", "float", 2.0, CORPUS_MODES),
    Option("corpus.cutoff_min", "int", None, ("lab-inequality",), (), "lowest per-sample band limit"),
    Option("corpus.slopes", "floats", (), ("lab-inequality",), (), "extra corpus slopes for the Q-trend"),
    Option("lab.s", "float", 0.5, ("lab-inequality",)),
    Option("lab.operator", "str", "riesz12", ("lab-inequality",), ("identity", "riesz11", "riesz12", "riesz22")),
    Option("lab.q_trend_limit", "float", 0.1, ("lab-inequality",)),
    Option("lab.refine", "bool", True, REFINE_MODES, (), "repeat the sweep at 2N"),
    Option("lab.refine_limit", "float", 0.2, REFINE_MODES),
    Option("lab.mu", "float", 0.5, ("lab-commutator",)),
    Option("commutator.f_cutoff", "int", 4, ("lab-commutator",)),
    Option("commutator.f_slope", "float", 3.0, ("lab-commutator",)),

    Option("kernel.rho_min", "float", 1e-3, ("lab-kernel",)),
    Option("kernel.rho_max", "float", 1.0, ("lab-kernel",)),
    Option("kernel.per_decade", "int", 5, ("lab-kernel",)),
    Option("kernel.order", "int", KERNEL_GAUSS_ORDER, ("lab-kernel",)),
    Option("kernel.refine", "bool", True, ("lab-kernel",), (), "repeat at double quadrature order"),
    Option("kernel.refine_limit", "float", 0.1, ("lab-kernel",)),

    Option("envelope.family", "str", "gamma", ("osgood-table",), ("gamma", "patch", "two_term", "linear")),
    Option("envelope.kind", "str", "linear", ("osgood-table",), ("linear", "two-term")),
    Option("envelope.f0", "float", 2.0, ("osgood-table",)),
    Option("envelope.C", "float", 1.0, ("osgood-table",)),
    Option("envelope.t_end", "float", 1.0, ("osgood-table",)),
    Option("envelope.points", "int", 101, ("osgood-table",)),

    Option("hypotheses.expect", "str", None, ("hypotheses",), tuple(v.value for v in OsgoodVerdict)),
]
OPTIONS = {option.key: option for option in SCHEMA}

CHECKS = {
    "euler": ("l2_conservation", "linf_growth", "bkm", "no_blow_up", "fit_finite"),
    "patch": ("area_conservation", "grad_inf_tracking", "losing_exponent", "boundary_stationary",
              "tangential_bounded"),
    "lab-inequality": ("refinement_stable", "no_q_trend"),
    "lab-kernel": ("majorant_finite", "refinement_stable"),
    "lab-commutator": ("refinement_stable", "zero_for_constant"),
    "osgood-table": ("finite_on_grid",),
    "hypotheses": ("expected_verdict",),
}

# Enforced checks that only exist when an option enables them
CHECK_REQUIRES = {
    ("patch", "tangential_bounded"): "patch.aspects",
    ("lab-inequality", "refinement_stable"): "lab.refine",
    ("lab-commutator", "refinement_stable"): "lab.refine",
    ("lab-kernel", "refinement_stable"): "kernel.refine",
    ("hypotheses", "expected_verdict"): "hypotheses.expect",
}


def _scalar(kind, raw, key):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
            return value
        if kind == "bool":
            word = raw.strip().lower()
            if word in TRUE_WORDS:
                return True
            if word in FALSE_WORDS:
                return False
            raise ValueError(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}", key=key)


def coerce(option, raw):
    """Typed value of a raw string; empty means unset"""
    if raw is None or raw.strip() == "":
        return option.default
    if option.kind in ("ints", "floats", "strs"):
        kind = option.kind[:-1]
        return tuple(_scalar(kind, part, option.key) for part in raw.split(",") if part.strip())
    value = _scalar(option.kind, raw, option.key)
    if option.choices and value not in option.choices:
        raise ConfigError(f"{option.key} must be one of {', '.join(option.choices)}, got {value!r}", key=option.key)
    return value


def format_option(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(format_option(v) for v in value)
    return str(value)


@dataclass
class Scenario:
    name: str
    mode: str
    values: dict
    source: Path = None
    notes: list = field(default_factory=list)

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    @property
    def seed(self):
        return self.values["seed"]

    @property
    def threads(self):
        return self.values["threads"]

    @property
    def description(self):
        return self.values["description"]

    @property
    def output_dir(self):
        return Path(self.values["output.dir"])

    @property
    def enforce(self):
        return self.values["report.enforce"]

    def resolved(self):
        """Every applicable option with defaults materialized, as scenario-file strings"""
        return {key: format_option(value) for key, value in self.values.items()}

    def multiplier(self):
        return build_multiplier(self.values)

    def grid(self, N=None):
        return Grid(N or self.values["grid.N"], self.values["domain.L"])


def build_multiplier(values):
    kind = values["multiplier.kind"]
    params = {"clamp_floor": values["multiplier.clamp_floor"]}
    if kind == MultiplierKind.CONSTANT.value:
        params["constant"] = values["multiplier.constant"]
    elif kind == MultiplierKind.ITERATED_LOG.value:
        params["exponents"] = values["multiplier.exponents"]
    else:
        if not values["multiplier.table_m"]:
            raise ConfigError("multiplier.table_m required for multiplier.kind=user_table", key="multiplier.table_m")
        if values["multiplier.table_log_r"]:
            params["table_log_r"] = values["multiplier.table_log_r"]
        elif values["multiplier.table_r"]:
            params["table_r"] = values["multiplier.table_r"]
        else:
            raise ConfigError(
                "multiplier.table_r or multiplier.table_log_r required for multiplier.kind=user_table",
                key="multiplier.table_r",
            )
        params["table_m"] = values["multiplier.table_m"]
    try:
        return Multiplier.create(kind, **params)
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"multiplier: {e}", key="multiplier.kind") from e


def resolve_path(name_or_path):
    """A scenario file path, or the name of a bundled scenario"""
    path = Path(name_or_path)
    if path.is_file():
        return path
    bundled = SCENARIO_DIR / f"{name_or_path}.env"
    if bundled.is_file():
        return bundled
    raise ConfigError(f"scenario not found: {name_or_path}")


def read_raw(path):
    try:
        raw = dotenv_values(path)
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read scenario {path}: {e}") from e
    return {key.strip(): value for key, value in raw.items()}


def load_scenario(name_or_path, overrides=None):
    """Parse and validate a scenario; overrides are raw strings keyed like the file"""
    path = resolve_path(name_or_path)
    raw = read_raw(path)
    raw.update({key: value for key, value in (overrides or {}).items() if value is not None})
    scenario = from_raw(raw, default_name=path.stem, source=path)
    logger.info(f"Loaded scenario {scenario.name} (mode={scenario.mode}) from {path}")
    return scenario


def from_raw(raw, default_name="scenario", source=None):
    mode = raw.get("mode")
    if mode is None or not mode.strip():
        raise ConfigError("mode required", key="mode")
    mode = coerce(OPTIONS["mode"], mode)

    unknown = sorted(key for key in raw if key not in OPTIONS)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]}", key=unknown[0])
    for key in raw:
        if raw[key] and not OPTIONS[key].applies_to(mode):
            raise ConfigError(f"{key} is not used by mode={mode}", key=key)

    values = {}
    for option in SCHEMA:
        if option.applies_to(mode):
            values[option.key] = coerce(option, raw.get(option.key))

    values["name"] = values["name"] or default_name
    if mode in GRID_MODES and values["grid.N"] is None:
        raise ConfigError(f"grid.N required for mode={mode}", key="grid.N")
    if values["seed"] is None:
        if mode in CORPUS_MODES:
            raise ConfigError(f"seed required for mode={mode}", key="seed")
        values["seed"] = 0
    if values["output.dir"] is None:
        values["output.dir"] = str(OUTPUT_DIR / values["name"])

    scenario = Scenario(values["name"], mode, values, source)
    validate(scenario)
    return scenario


def _require(condition, message, key):
    if not condition:
        raise ConfigError(message, key=key)


def validate(scenario):
    """Schema and invariant checks with no computation; raises ConfigError"""
    values = scenario.values
    mode = scenario.mode
    _require(values["threads"] >= 1, "threads must be >= 1", "threads")

    for check in scenario.enforce:
        _require(check in CHECKS[mode], f"report.enforce: unknown check {check} for mode={mode}", "report.enforce")
        needed = CHECK_REQUIRES.get((mode, check))
        if needed is not None:
            _require(bool(values[needed]), f"report.enforce: {check} needs {needed}", needed)

    scenario.multiplier()

    if mode in GRID_MODES:
        try:
            grid = scenario.grid()
        except ValueError as e:
            raise ConfigError(str(e), key="grid.N") from e
    if mode in TIME_MODES:
        _require(values["time.end"] > 0, "time.end must be positive", "time.end")
        _require(values["time.cadence"] > 0, "time.cadence must be positive", "time.cadence")
        _require(values["time.dt"] is None or values["time.dt"] > 0, "time.dt must be positive", "time.dt")
        _require(0 < values["time.cfl_safety"] <= 1, "time.cfl_safety must lie in (0, 1]", "time.cfl_safety")

    if mode == "euler":
        _validate_euler(values, grid)
    elif mode == "patch":
        _validate_patch(values)
    elif mode in CORPUS_MODES:
        _validate_corpus(values, grid, mode)
    elif mode == "lab-kernel":
        lo, hi = values["kernel.rho_min"], values["kernel.rho_max"]
        _require(1e-3 <= lo < hi <= 1.0, "kernel radii must satisfy 1e-3 <= rho_min < rho_max <= 1", "kernel.rho_min")
        _require(values["kernel.per_decade"] >= 1, "kernel.per_decade must be >= 1", "kernel.per_decade")
        _require(values["kernel.order"] >= 2, "kernel.order must be >= 2", "kernel.order")
    elif mode == "osgood-table":
        _require(values["envelope.f0"] > 0, "envelope.f0 must be positive", "envelope.f0")
        _require(values["envelope.C"] > 0, "envelope.C must be positive", "envelope.C")
        _require(values["envelope.t_end"] > 0, "envelope.t_end must be positive", "envelope.t_end")
        _require(values["envelope.points"] >= 2, "envelope.points must be >= 2", "envelope.points")

    _check_output_dir(scenario.output_dir)
    return scenario


def _validate_euler(values, grid):
    _require(values["solver.inner_iterations"] >= 1, "solver.inner_iterations must be >= 1", "solver.inner_iterations")
    _require(values["diagnostics.s"] and all(0 < s <= 1 for s in values["diagnostics.s"]),
             "diagnostics.s values must lie in (0, 1]", "diagnostics.s")
    _require(values["output.snapshot_every"] >= 0, "output.snapshot_every must be >= 0", "output.snapshot_every")
    if values["initial.kind"] == "single_mode":
        _require(len(values["initial.k"]) == 2, "initial.k needs two integers", "initial.k")
    if values["initial.kind"] == "random":
        _require(1 <= values["initial.cutoff"] and 3 * values["initial.cutoff"] < grid.N,
                 "initial.cutoff must lie in [1, N/3)", "initial.cutoff")


def _validate_patch(values):
    mus = values["patch.mu"]
    _require(mus and all(0 < mu <= 1 for mu in mus), "patch.mu values must lie in (0, 1]", "patch.mu")
    _require(0 < values["patch.eps"] < min(mus), "patch.eps must lie in (0, min patch.mu)", "patch.eps")
    _require(values["patch.radius"] > 0, "patch.radius must be positive", "patch.radius")
    _require(values["patch.aspect"] >= 1, "patch.aspect must be >= 1", "patch.aspect")
    _require(all(a >= 1 for a in values["patch.aspects"]), "patch.aspects must be >= 1", "patch.aspects")
    _require(0 < values["patch.arc_mu"] <= 1, "patch.arc_mu must lie in (0, 1]", "patch.arc_mu")
    _require(bool(values["patch.arc_distances"]) == bool(values["patch.arc_rhos"]),
             "patch.arc_distances and patch.arc_rhos go together", "patch.arc_rhos")


def _validate_corpus(values, grid, mode):
    _require(values["corpus.count"] >= 1, "corpus.count must be >= 1", "corpus.count")
    _require(1 <= values["corpus.cutoff"] and 3 * values["corpus.cutoff"] < grid.N,
             f"corpus.cutoff must lie in [1, N/3) for N={grid.N}", "corpus.cutoff")
    if mode == "lab-inequality":
        _require(0 < values["lab.s"] <= 1, "lab.s must lie in (0, 1]", "lab.s")
        low = values["corpus.cutoff_min"]
        _require(low is None or 1 <= low <= values["corpus.cutoff"],
                 "corpus.cutoff_min must lie in [1, corpus.cutoff]", "corpus.cutoff_min")
    else:
        _require(0 < values["lab.mu"] <= 1, "lab.mu must lie in (0, 1]", "lab.mu")
        _require(1 <= values["commutator.f_cutoff"] and 8 * values["commutator.f_cutoff"] < grid.N,
                 f"commutator.f_cutoff must lie in [1, N/8) for N={grid.N}", "commutator.f_cutoff")


def _check_output_dir(path):
    """The directory, or its nearest existing ancestor, must be writable"""
    probe = Path(path).resolve()
    while not probe.exists():
        probe = probe.parent
    _require(probe.is_dir() and os.access(probe, os.W_OK), f"output directory {path} is not writable", "output.dir")


def list_scenarios():
    """Bundled scenarios as (name, mode, description) rows"""
    rows = []
    for path in sorted(SCENARIO_DIR.glob("*.env")):
        raw = read_raw(path)
        rows.append((path.stem, raw.get("mode", "?"), raw.get("description", "") or ""))
    return rows
