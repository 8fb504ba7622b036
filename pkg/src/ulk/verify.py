"""Executable checks of the published claims, collected into a report.

Three families of checks are run:

* equivalence: the two closed-form formulations of u(t) and h(t) agree, on
  the given economy and on seeded random draws; B(t) rebuilt from A(t)
  matches quadrature;
* uniqueness: G has one sign change, the closed-form u(t) at the root
  reproduces the ODE, and a nudged u0 visibly does not;
* balanced growth: long-run growth rates, c/k and u reach their limits.

A report is a plain ordered list of checks; given the same parameters and
seed it serialises to the same bytes.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import calibration_at, saddle_probe, scan_G, sign_changes, solve_u0, steady_state
from .closedform import b_from_a_identity, integral_B, trajectory, uniform_grid
from .errors import CalibrationError, InvariantError, ParamError, UlkError
from .oracle import OdeState, compare, integrate
from .params import DerivedConstants, ModelParams, derive_constants

# sampling box for random economies; k0, h0 come from the base economy
DRAW_RANGES = {
    "beta": (0.15, 0.45),
    "sigma": (0.8, 3.0),
    "delta": (0.005, 0.08),
    "rho": (0.005, 0.08),
    "pi": (0.005, 0.08),
    "gamma": (0.5, 1.5),
}
MAX_REJECTIONS = 100_000

EQUIV_T_MAX = 50.0
EQUIV_POINTS = 512
IDENTITY_TIMES = (0.0, 1.0, 5.0, 20.0, 50.0)
ORACLE_T_MAX = 50.0
ORACLE_POINTS = 501
BGP_TIME = 300.0
NUDGE = 1e-3


@dataclass(frozen=True)
class Thresholds:
    equivalence_rel: float = 1e-9
    identity_abs: float = 1e-8
    identity_abs_draws: float = 1e-7
    oracle_rel: float = 1e-6
    nudge_dev: float = 1e-3
    residual_rel: float = 1e-10
    growth_abs: float = 1e-5
    ck_abs: float = 1e-5
    u_abs: float = 1e-4


@dataclass
class Check:
    name: str
    status: str  # "pass", "fail" or "skip"
    measured: float
    threshold: float
    where: str = ""
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "measured": _num(self.measured),
            "threshold": _num(self.threshold),
            "where": self.where,
            "detail": self.detail,
        }


def _num(x: float):
    # JSON has no nan/inf
    return x if math.isfinite(x) else repr(x)


def _check(name: str, measured: float, threshold: float, where: str = "", detail: str = "",
           want_above: bool = False) -> Check:
    ok = measured > threshold if want_above else measured <= threshold
    return Check(name, "pass" if ok else "fail", float(measured), float(threshold), where, detail)


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    params_echo: dict = field(default_factory=dict)
    seed: int | None = None
    n_draws: int = 0
    rejected_draws: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == "fail"]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "n_draws": self.n_draws,
            "rejected_draws": dict(sorted(self.rejected_draws.items())),
            "params": self.params_echo,
            "checks": [c.as_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{k} = {v!r}" for k, v in self.params_echo.items()]
        lines.append(f"seed = {self.seed}, draws = {self.n_draws}, rejected = {sum(self.rejected_draws.values())}")
        for c in self.checks:
            line = f"{c.status.upper():4}  {c.name:<34} measured={c.measured:.3e} threshold={c.threshold:.1e}"
            if c.where:
                line += f"  at {c.where}"
            if c.detail:
                line += f"  ({c.detail})"
            lines.append(line)
        lines.append("ALL PASS" if self.passed else f"{len(self.failures)} FAILED")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# random economies


def draw_params(rng: np.random.Generator, base: ModelParams, rejected: dict | None = None) -> ModelParams:
    """Draw one economy from :data:`DRAW_RANGES` by rejection sampling.

    Accepted draws have xi > varphi, eta != 0, u* in (0, 1) and a bracketable
    u0 equation at the base endowment ratio.  Rejections are tallied by
    reason in ``rejected``.
    """
    rejected = {} if rejected is None else rejected
    for _ in range(MAX_REJECTIONS):
        vals = {k: float(rng.uniform(lo, hi)) for k, (lo, hi) in DRAW_RANGES.items()}
        p = dataclasses.replace(base, **vals)
        reason = _draw_rejection(p)
        if reason is None:
            return p
        rejected[reason] = rejected.get(reason, 0) + 1
    raise RuntimeError("rejection sampling did not find an admissible economy")


def _draw_rejection(p: ModelParams) -> str | None:
    try:
        dc = derive_constants(p)
    except ParamError:
        return "eta"
    except CalibrationError:
        return "xi"
    if dc.xi_minus_varphi <= 0.0:
        return "xi_le_varphi"
    if not 0.0 < dc.u_star < 1.0:
        return "u_star"
    try:
        solve_u0(dc)
    except CalibrationError as exc:
        return type(exc).__name__
    return None


# ---------------------------------------------------------------------------
# individual checks


@dataclass
class _EquivStats:
    u_rel: float
    u_t: float
    h_rel: float
    h_t: float
    ident: float
    ident_t: float


def _equivalence_stats(dc: DerivedConstants, corrupt_chi: float | None) -> _EquivStats:
    cal = calibration_at(dc, solve_u0(dc).root)
    if corrupt_chi is not None:
        dc = dataclasses.replace(dc, chi_c=dc.chi_c * corrupt_chi)
    tr = trajectory(dc, cal, uniform_grid(EQUIV_T_MAX, EQUIV_POINTS))
    urel = np.abs(tr["u_alt"] - tr["u"]) / tr["u"]
    hrel = np.abs(tr["h_alt"] - tr["h"]) / tr["h"]
    iu, ih = int(np.argmax(urel)), int(np.argmax(hrel))
    times = np.array(IDENTITY_TIMES)
    rebuilt = np.atleast_1d(b_from_a_identity(dc, cal, times))
    quad = np.array([integral_B(dc, cal.z0, float(t), cal.tol).value for t in times])
    gap = np.abs(rebuilt - quad)
    ig = int(np.argmax(gap))
    return _EquivStats(float(urel[iu]), float(tr.grid[iu]), float(hrel[ih]), float(tr.grid[ih]),
                       float(gap[ig]), float(times[ig]))


def check_equivalence(p: ModelParams, n_draws: int, seed: int, thresholds: Thresholds = Thresholds(),
                      corrupt_chi: float | None = None, rejected: dict | None = None) -> list[Check]:
    """Both formulations of u and h, and the B identity, on ``p`` and on ``n_draws`` random economies.

    ``corrupt_chi`` multiplies chi_c before evaluating the alternative
    formulation; it exists so tests can confirm a wrong constant is caught.
    """
    if n_draws < 0:
        raise ValueError("n_draws must be non-negative")
    th = thresholds
    out = []
    try:
        s = _equivalence_stats(derive_constants(p), corrupt_chi)
    except (CalibrationError, InvariantError) as exc:
        out.append(Check("equivalence.given", "skip", math.nan, th.equivalence_rel, detail=str(exc)))
    else:
        out.append(_check("equivalence.u.given", s.u_rel, th.equivalence_rel, f"t={s.u_t:.4g}"))
        out.append(_check("equivalence.h.given", s.h_rel, th.equivalence_rel, f"t={s.h_t:.4g}"))
        out.append(_check("b_identity.given", s.ident, th.identity_abs, f"t={s.ident_t:g}"))
    if n_draws == 0:
        return out

    rng = np.random.default_rng(seed)
    rejected = {} if rejected is None else rejected
    worst_u = worst_h = worst_i = (-1.0, "")
    for i in range(n_draws):
        q = draw_params(rng, p, rejected)
        try:
            s = _equivalence_stats(derive_constants(q), corrupt_chi)
        except UlkError as exc:
            # draw_params only returns calibratable economies, so this is a genuine failure
            out.append(Check(f"equivalence.draw[{i}]", "fail", math.inf, th.equivalence_rel, detail=str(exc)))
            continue
        worst_u = max(worst_u, (s.u_rel, f"draw {i}, t={s.u_t:.4g}"), key=lambda x: x[0])
        worst_h = max(worst_h, (s.h_rel, f"draw {i}, t={s.h_t:.4g}"), key=lambda x: x[0])
        worst_i = max(worst_i, (s.ident, f"draw {i}, t={s.ident_t:g}"), key=lambda x: x[0])
    out.append(_check("equivalence.u.draws", worst_u[0], th.equivalence_rel, worst_u[1], f"{n_draws} draws"))
    out.append(_check("equivalence.h.draws", worst_h[0], th.equivalence_rel, worst_h[1], f"{n_draws} draws"))
    out.append(_check("b_identity.draws", worst_i[0], th.identity_abs_draws, worst_i[1], f"{n_draws} draws"))
    return out


def check_uniqueness_numerics(p: ModelParams, thresholds: Thresholds = Thresholds()) -> list[Check]:
    """Single sign change of G, closed form vs ODE at the root, and a nudged-u0 witness."""
    th = thresholds
    dc = derive_constants(p)
    if dc.xi_minus_varphi <= 0.0:
        return [Check("uniqueness", "skip", dc.xi_minus_varphi, 0.0,
                      detail="out of regime: xi <= varphi, B* diverges")]
    samples = scan_G(dc)
    changes = sign_changes(samples)
    out = [Check("uniqueness.sign_changes", "pass" if len(changes) == 1 else "fail", float(len(changes)), 1.0,
                 ", ".join(f"({a:.4g}, {b:.4g})" for a, b in changes))]
    if len(changes) != 1:
        return out
    prof = solve_u0(dc)
    out.append(_check("uniqueness.residual", abs(prof.residual_at_root) / prof.scale, th.residual_rel,
                      f"u0={prof.root:.12g}"))
    cal = calibration_at(dc, prof.root)
    grid = uniform_grid(ORACLE_T_MAX, ORACLE_POINTS)
    closed = trajectory(dc, cal, grid)
    try:
        ode = integrate(dc, OdeState(p.k0, p.h0, cal.c0, cal.u0), grid)
    except InvariantError as exc:
        out.append(Check("uniqueness.oracle", "fail", math.inf, th.oracle_rel, detail=str(exc)))
    else:
        rep = compare(closed, ode, ["k", "h", "c", "u"])
        worst = max(rep.columns.items(), key=lambda kv: kv[1].max_rel)
        out.append(_check("uniqueness.oracle", worst[1].max_rel, th.oracle_rel,
                          f"{worst[0]}, t={worst[1].t_at_max_rel:.4g}"))

    # a nudged u0 (with its own c0) must visibly leave the closed-form path
    nudged = calibration_at(dc, prof.root + NUDGE)
    try:
        ode = integrate(dc, OdeState(p.k0, p.h0, nudged.c0, nudged.u0), grid)
        dev = float(np.max(np.abs(ode["u"] - closed["u"])))
        where = f"t<={ORACLE_T_MAX:g}"
    except InvariantError as exc:
        dev, where = math.inf, str(exc)
    out.append(_check("uniqueness.nudge_witness", dev, th.nudge_dev, where, f"u0+{NUDGE:g}", want_above=True))
    probe = saddle_probe(dc, prof.root)
    out.append(Check("uniqueness.admissible_1000", "pass" if probe.exit_time is None else "fail",
                     probe.exit_time if probe.exit_time is not None else probe.t_end, 1000.0,
                     "u(t) in (0,1) on [0, 1000]"))
    return out


def check_bgp(p: ModelParams, thresholds: Thresholds = Thresholds(), t: float = BGP_TIME) -> list[Check]:
    """Growth rates of c, k, h, and the levels c/k and u, at time ``t``."""
    th = thresholds
    dc = derive_constants(p)
    ss = steady_state(dc)
    cal = calibration_at(dc, solve_u0(dc).root)
    # symmetric log differences over one year around t
    tr = trajectory(dc, cal, np.array([t - 0.5, t, t + 0.5]))
    out = []
    for name in ("c", "k", "h"):
        rate = math.log(tr[name][2] / tr[name][0])
        out.append(_check(f"bgp.growth_{name}", abs(rate - ss.g_bgp), th.growth_abs, f"t={t:g}",
                          f"rate={rate:.9g}, limit={ss.g_bgp:.9g}"))
    ck = float(tr["c_over_k"][1])
    out.append(_check("bgp.c_over_k", abs(ck - ss.ck_limit), th.ck_abs, f"t={t:g}",
                      f"value={ck:.9g}, limit={ss.ck_limit:.9g}"))
    u = float(tr["u"][1])
    out.append(_check("bgp.u", abs(u - ss.u_star), th.u_abs, f"t={t:g}", f"value={u:.9g}, limit={ss.u_star:.9g}"))
    return out


def run_verification(p: ModelParams, n_draws: int = 100, seed: int = 42, thresholds: Thresholds = Thresholds(),
                     corrupt_chi: float | None = None) -> VerificationReport:
    """Every check on economy ``p``; checks that cannot run are recorded as skipped."""
    if n_draws < 0:
        raise ValueError("n_draws must be non-negative")
    report = VerificationReport(params_echo=p.as_dict(), seed=seed, n_draws=n_draws)
    report.checks += check_equivalence(p, n_draws, seed, thresholds, corrupt_chi, report.rejected_draws)
    for fn, label in ((check_uniqueness_numerics, "uniqueness"), (check_bgp, "bgp")):
        try:
            report.checks += fn(p, thresholds)
        except (CalibrationError, InvariantError) as exc:
            report.checks.append(Check(label, "skip", math.nan, math.nan, detail=f"{type(exc).__name__}: {exc}"))
    return report
