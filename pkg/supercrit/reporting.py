"""
Output bundle writers shared by every scenario mode. Floats go through
repr(float(x)) so repeated runs with the same seed produce identical bytes.
"""

import csv
import json
from enum import Enum
from pathlib import Path

import numpy as np

from supercrit.config import TORUS_NOTICE
from supercrit.logging_config import loggers

logger = loggers['cli']


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def write_csv(path, rows, columns=None):
    """Write a list of dict rows; columns default to the keys of the first row"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in columns])
    logger.debug(f"Wrote {len(rows)} rows to {path}")
    return path


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _stringify_keys(value):
    if isinstance(value, dict):
        return {str(k): _stringify_keys(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_stringify_keys(v) for v in value]
    return value


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_stringify_keys(payload), handle, indent=2, default=_json_default)
        handle.write("\n")
    return path


def write_resolved_env(path, resolved):
    """Resolved scenario as key=value lines, itself a valid scenario file"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {TORUS_NOTICE}"]
    lines.extend(f"{key}={value}" for key, value in resolved.items())
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def build_report(scenario, payload, exit_code, wall_clock):
    return {
        "scenario": scenario.name,
        "mode": scenario.mode,
        "seed": scenario.seed,
        "notice": TORUS_NOTICE,
        "exitCode": exit_code,
        "wallClock": wall_clock,
        "resolvedConfig": scenario.resolved(),
        **payload,
    }
