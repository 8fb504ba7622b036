"""Command-line front end.

    ulk calibrate [--config PATH] [--beta X ...] [--out DIR]
    ulk solve     [--calibration FILE] [--t-max X] [--n-points N] [--svg]
    ulk verify    [--seed N] [--n-draws N]
    ulk sweep     --param NAME --lo X --hi X [--steps N]
    ulk plot      [--csv FILE]

Without ``--config`` the parameters start from the benchmark economy and
flags override them.  With ``--config`` the file (plus flags) must supply
all eight keys.

Exit codes: 0 success, 2 invalid input, 3 calibration failure,
4 verification or invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .calibration import calibration_at, solve_u0, steady_state
from .closedform import DEFAULT_TOL, trajectory, uniform_grid
from .errors import CalibrationError, InvariantError, ParamError
from .io import (
    ConfigError,
    load_params_map,
    read_calibration,
    read_trajectory_csv,
    trajectory_csv,
    write_calibration,
)
from .params import BENCHMARK, PARAM_KEYS, ModelParams, derive_constants, sigma_restriction, validate_params
from .svg import overlay_charts
from .verify import run_verification

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CALIBRATION = 3
EXIT_VERIFY = 4

CALIBRATION_FILE = "calibration.txt"
TRAJECTORY_FILE = "trajectory.csv"
CK_RTOL = 1e-12
Z_RTOL = 1e-8


class UsageError(ValueError):
    pass


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value parameter file")
    for key in PARAM_KEYS:
        common.add_argument(f"--{key}", type=float, metavar="X")
    common.add_argument("--t-max", type=float, default=50.0)
    common.add_argument("--n-points", type=int, default=501)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--n-draws", type=int, default=100)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ulk", description="Lucas-Uzawa closed-form solver and checker")
    parser.add_argument("--version", action="version", version=f"ulk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    sub.add_parser("calibrate", parents=[common], help="solve for u0 and write the calibration file")

    p = sub.add_parser("solve", parents=[common], help="closed-form trajectory to CSV")
    p.add_argument("--calibration", type=Path, help="reuse a calibration file")
    p.add_argument("--svg", action="store_true", help="also write h.svg and u.svg")

    p = sub.add_parser("verify", parents=[common], help="run the verification checks")
    p.add_argument("--corrupt-chi", type=float, metavar="FACTOR",
                   help="test hook: scale chi_c by FACTOR before the equivalence checks")

    p = sub.add_parser("sweep", parents=[common], help="calibrate across a range of one parameter")
    p.add_argument("--param", required=True, choices=PARAM_KEYS)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--steps", type=int, default=11)

    p = sub.add_parser("plot", parents=[common], help="SVG charts from a trajectory CSV")
    p.add_argument("--csv", type=Path, help=f"defaults to OUT/{TRAJECTORY_FILE}")
    return parser


# ---------------------------------------------------------------------------
# helpers


def _overrides(args) -> dict[str, float | None]:
    return {k: getattr(args, k) for k in PARAM_KEYS}


def params_from_args(args) -> ModelParams:
    raw = load_params_map(args.config, _overrides(args))
    if args.config is None:
        raw = {**BENCHMARK.as_dict(), **raw}
    return validate_params(raw)


def _check_run_config(args) -> None:
    if not (math.isfinite(args.t_max) and args.t_max > 0.0):
        raise UsageError(f"--t-max must be positive, got {args.t_max}")
    if args.n_points < 2:
        raise UsageError(f"--n-points must be at least 2, got {args.n_points}")
    if not (math.isfinite(args.tol) and args.tol > 0.0):
        raise UsageError(f"--tol must be positive, got {args.tol}")


def _out_dir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def _say(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_calibrate(args) -> int:
    p = params_from_args(args)
    dc = derive_constants(p)
    prof = solve_u0(dc, args.tol)
    cal = calibration_at(dc, prof.root, args.tol)
    path = _out_dir(args) / CALIBRATION_FILE
    write_calibration(path, p, cal)
    _say(
        f"u0 = {cal.u0!r}\nc0 = {cal.c0!r}\nz0 = {cal.z0!r}\nA_star = {cal.A_star!r}\nB_star = {cal.B_star!r}\n"
        f"residual = {abs(prof.residual_at_root):.3e} (scale {prof.scale:.3g}, {prof.method}, "
        f"{prof.iterations} iterations)\nwrote {path}"
    )
    return EXIT_OK


def _solve_inputs(args):
    if args.calibration is None:
        p = params_from_args(args)
        dc = derive_constants(p)
        return dc, calibration_at(dc, solve_u0(dc, args.tol).root, args.tol)
    echo, cal = read_calibration(args.calibration)
    if len(echo) != len(PARAM_KEYS):
        raise ConfigError(f"{args.calibration}: parameter echo incomplete")
    p = validate_params(echo)
    for k, v in _overrides(args).items():
        if v is not None and v != getattr(p, k):
            raise UsageError(f"--{k}={v} differs from the value {getattr(p, k)} in {args.calibration}")
    return derive_constants(p), cal


def cmd_solve(args) -> int:
    _check_run_config(args)
    dc, cal = _solve_inputs(args)
    traj = trajectory(dc, cal, uniform_grid(args.t_max, args.n_points))
    traj.check_invariants(z_rtol=Z_RTOL)
    ck_gap = np.max(np.abs(traj["c_over_k"] * traj["k"] / traj["c"] - 1.0))
    if ck_gap > CK_RTOL:
        raise InvariantError(f"c = (c/k) k broken by {ck_gap:.3e}")
    out = _out_dir(args)
    path = out / TRAJECTORY_FILE
    path.write_text(trajectory_csv(traj), newline="")
    _say(f"wrote {path} ({len(traj)} rows)")
    if args.svg:
        for name, text in overlay_charts(traj.grid, traj.columns).items():
            (out / name).write_text(text)
            _say(f"wrote {out / name}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.n_draws < 1:
        raise UsageError(f"--n-draws must be at least 1, got {args.n_draws}")
    p = params_from_args(args)
    report = run_verification(p, args.n_draws, args.seed, corrupt_chi=args.corrupt_chi)
    out = _out_dir(args)
    (out / "verification.txt").write_text(report.to_text())
    (out / "verification.json").write_text(report.to_json())
    _say(report.to_text())
    return EXIT_OK if report.passed else EXIT_VERIFY


SWEEP_COLUMNS = ("status", "u0", "u_star", "g_bgp", "A_star", "residual", "sigma_restricted")


def sweep_rows(base: dict[str, float], name: str, values: Sequence[float], tol: float = DEFAULT_TOL):
    """One dict per value; rows that cannot be calibrated carry a status instead of numbers."""
    rows = []
    for v in values:
        row: dict[str, object] = {name: float(v)}
        row.update({k: math.nan for k in SWEEP_COLUMNS[1:]})
        try:
            p = validate_params({**base, name: float(v)})
        except ParamError as exc:
            row.update(status="inadmissible", sigma_restricted=math.nan)
            row["detail"] = str(exc)
            rows.append(row)
            continue
        sr = sigma_restriction(p)
        row["sigma_restricted"] = sr.sigma_restricted if sr.feasible else "infeasible"
        try:
            dc = derive_constants(p)
            prof = solve_u0(dc, tol)
            cal = calibration_at(dc, prof.root, tol)
            ss = steady_state(dc)
        except (ParamError, CalibrationError) as exc:
            row["status"] = type(exc).__name__
            row["detail"] = str(exc).splitlines()[0]
            rows.append(row)
            continue
        row.update(status="ok", u0=cal.u0, u_star=ss.u_star, g_bgp=ss.g_bgp, A_star=cal.A_star,
                   residual=abs(prof.residual_at_root))
        rows.append(row)
    return rows


def _cell(v) -> str:
    return "%.17g" % v if isinstance(v, float) else str(v)


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if not (math.isfinite(args.lo) and math.isfinite(args.hi)):
        raise UsageError("--lo and --hi must be finite")
    raw = load_params_map(args.config, _overrides(args))
    base = raw if args.config is not None else {**BENCHMARK.as_dict(), **raw}
    values = np.linspace(args.lo, args.hi, args.steps)
    rows = sweep_rows(base, args.param, values, args.tol)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((args.param,) + SWEEP_COLUMNS)
    for row in rows:
        w.writerow([_cell(row[args.param])] + [_cell(row[c]) for c in SWEEP_COLUMNS])
    path = _out_dir(args) / f"sweep_{args.param}.csv"
    path.write_text(buf.getvalue(), newline="")
    _say(buf.getvalue() + f"wrote {path}")
    return EXIT_OK


def cmd_plot(args) -> int:
    src = args.csv if args.csv is not None else args.out / TRAJECTORY_FILE
    try:
        traj = read_trajectory_csv(src)
    except OSError as exc:
        raise ConfigError(f"cannot read {src}: {exc}") from exc
    missing = [c for c in ("h", "h_alt", "u", "u_alt") if c not in traj.columns]
    if missing:
        raise ConfigError(f"{src}: missing columns {', '.join(missing)}")
    out = _out_dir(args)
    for name, text in overlay_charts(traj.grid, traj.columns).items():
        (out / name).write_text(text)
        _say(f"wrote {out / name}")
    return EXIT_OK


COMMANDS = {
    "calibrate": cmd_calibrate,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParamError, ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CalibrationError as exc:
        print(f"calibration failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except InvariantError as exc:
        print(f"invariant violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
