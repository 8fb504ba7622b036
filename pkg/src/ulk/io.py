"""Flat key = value files and the trajectory CSV format."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .closedform import COLUMNS, Calibration, Trajectory
from .params import PARAM_KEYS, ModelParams

CSV_HEADER = ("t",) + COLUMNS
CALIBRATION_KEYS = ("u0", "c0", "z0", "A_star", "B_star", "tol")


class ConfigError(ValueError):
    """Malformed config or calibration file."""


def parse_keyvalue(text: str, source: str = "<string>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_keyvalue(path: str | Path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_keyvalue(text, str(path))


def format_keyvalue(items: Iterable[tuple[str, object]]) -> str:
    lines = []
    for k, v in items:
        lines.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
    return "\n".join(lines) + "\n"


def load_params_map(path: str | Path | None, overrides: Mapping[str, float | None]) -> dict[str, object]:
    """Merge a params file with flag overrides (flags win; None means not given).

    Unknown keys in the file are rejected so typos do not pass silently.
    """
    merged: dict[str, object] = dict(read_keyvalue(path)) if path is not None else {}
    unknown = sorted(set(merged) - set(PARAM_KEYS))
    if unknown:
        raise ConfigError(f"unknown parameter keys: {', '.join(unknown)}")
    for k, v in overrides.items():
        if v is not None:
            merged[k] = v
    return merged


def write_calibration(path: str | Path, p: ModelParams, cal: Calibration) -> None:
    items = [(k, float(getattr(cal, k))) for k in CALIBRATION_KEYS]
    items += [(k, float(v)) for k, v in p.as_dict().items()]
    Path(path).write_text("# calibration\n" + format_keyvalue(items))


def read_calibration(path: str | Path) -> tuple[dict[str, str], Calibration]:
    """Returns (params map, Calibration)."""
    kv = read_keyvalue(path)
    missing = [k for k in CALIBRATION_KEYS if k not in kv]
    if missing:
        raise ConfigError(f"{path}: missing calibration keys {', '.join(missing)}")
    try:
        cal = Calibration(**{k: float(kv[k]) for k in CALIBRATION_KEYS})
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    params = {k: kv[k] for k in PARAM_KEYS if k in kv}
    return params, cal


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: float) -> str:
    return "%.17g" % x


def format_csv(header: Sequence[str], rows: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(float(v)) for v in row) + "\n")
    return buf.getvalue()


def trajectory_csv(traj: Trajectory) -> str:
    rows = np.column_stack([traj.grid] + [traj[c] for c in COLUMNS])
    return format_csv(CSV_HEADER, rows)


def parse_csv(text: str) -> tuple[list[str], np.ndarray]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ConfigError("empty CSV")
    header = lines[0].split(",")
    rows = []
    for i, line in enumerate(lines[1:], 2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ConfigError(f"line {i}: expected {len(header)} fields, got {len(cells)}")
        rows.append([float(c) for c in cells])
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def read_trajectory_csv(path: str | Path) -> Trajectory:
    header, data = parse_csv(Path(path).read_text())
    if header[0] != "t":
        raise ConfigError(f"{path}: first column must be t")
    return Trajectory(data[:, 0].copy(), {name: data[:, j].copy() for j, name in enumerate(header[1:], 1)})
