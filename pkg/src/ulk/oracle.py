"""Direct numerical integration of the dynamical system.

The closed forms are checked against a Dormand-Prince 5(4) integration of
the k, h, c, u rows (plus both costates).  Capital stocks, consumption and
costates are integrated in logs, which keeps them positive over long
horizons; u is integrated in levels so that leaving (0, 1) is observable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .closedform import Trajectory
from .errors import Departed, GridMismatch, StepUnderflow
from .params import DerivedConstants

# Dormand-Prince 5(4) tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4
# coefficients of theta, theta^2, theta^3, theta^4 of the 4th-order continuous extension
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

STATE_NAMES = ("k", "h", "c", "u", "lambda_rel", "mu_rel")


@dataclass(frozen=True)
class OdeState:
    k: float
    h: float
    c: float
    u: float
    lambda_rel: float = 1.0
    mu_rel: float = 1.0

    def as_array(self) -> np.ndarray:
        return np.array([self.k, self.h, self.c, self.u, self.lambda_rel, self.mu_rel])


def rhs(dc: DerivedConstants, state: OdeState) -> np.ndarray:
    """Time derivatives (k', h', c', u', lambda', mu') in levels."""
    p = dc.params
    k, h, c, u, lam, mu = state.as_array()
    zb = (h * u / k) ** (1.0 - p.beta)
    return np.array([
        k * (p.gamma * zb - p.pi - c / k),
        h * p.delta * (1.0 - u),
        c * (-(p.rho + p.pi) / p.sigma + p.gamma * p.beta / p.sigma * zb),
        u * (dc.varphi - c / k + p.delta * u),
        lam * (p.rho + p.pi - p.beta * p.gamma * zb),
        mu * (p.rho - p.delta),
    ])


def _log_rhs(dc: DerivedConstants):
    p = dc.params
    b, g, d, pi, rho, s, vphi = p.beta, p.gamma, p.delta, p.pi, p.rho, p.sigma, dc.varphi
    out = np.empty(6)

    def f(_t: float, y: np.ndarray) -> np.ndarray:
        lk, lh, lc, u = y[0], y[1], y[2], y[3]
        ck = np.exp(lc - lk)
        zb = np.exp((1.0 - b) * (lh - lk)) * u ** (1.0 - b) if u > 0.0 else 0.0
        out[0] = g * zb - pi - ck
        out[1] = d * (1.0 - u)
        out[2] = -(rho + pi) / s + g * b / s * zb
        out[3] = (vphi - ck + d * u) * u
        out[4] = rho + pi - b * g * zb
        out[5] = rho - d
        return out.copy()

    return f


@dataclass
class OdeResult:
    t: np.ndarray
    y: np.ndarray
    steps: int
    rejected: int
    evaluations: int


def dormand_prince(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_eval: Sequence[float],
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    step: float | None = None,
    first_step: float | None = None,
    max_steps: int = 1_000_000,
    guard: Callable[[float, np.ndarray], None] | None = None,
) -> OdeResult:
    """Integrate y' = f(t, y) from t_eval[0], reporting y at every t_eval.

    With ``step`` set, the integration uses that fixed step and ignores the
    tolerances.  Otherwise the 5th-order solution is propagated with the
    embedded 4th-order estimate controlling the step.  Output points falling
    inside a step are filled in by the 4th-order continuous extension.
    ``guard(t, y)`` runs after each accepted step and may raise.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.ndim != 1 or t_eval.size == 0 or np.any(np.diff(t_eval) <= 0):
        raise ValueError("t_eval must be strictly increasing")
    t = float(t_eval[0])
    t_end = float(t_eval[-1])
    y = np.asarray(y0, dtype=float).copy()
    out = np.empty((t_eval.size, y.size))
    out[0] = y
    nxt = 1
    K = np.empty((7, y.size))
    K[0] = f(t, y)
    nfev = 1
    steps = rejected = 0

    if step is not None:
        h = float(step)
    elif first_step is not None:
        h = float(first_step)
    else:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((K[0] / scale) ** 2))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, t_end - t)

    while nxt < t_eval.size:
        if steps + rejected > max_steps:
            raise StepUnderflow(t, h)
        h = min(h, t_end - t)
        if h <= 16.0 * np.spacing(max(abs(t), 1.0)):
            raise StepUnderflow(t, h)
        for i in range(1, 7):
            K[i] = f(t + C[i] * h, y + h * (np.asarray(A[i]) @ K[:i]))
        nfev += 6
        y_new = y + h * (B5[:6] @ K[:6])
        if step is None:
            err_vec = h * (E @ K)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = np.sqrt(np.mean((err_vec / scale) ** 2))
            if err > 1.0:
                rejected += 1
                h *= max(0.2, 0.9 * err ** -0.2)
                continue
            factor = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = 1.0

        t_new = t + h
        # first-same-as-last: stage 7 was evaluated at (t_new, y_new)
        K_new = K[6].copy()
        while nxt < t_eval.size and t_eval[nxt] <= t_new + 1e-12 * max(1.0, abs(t_new)):
            theta = (t_eval[nxt] - t) / h
            if theta >= 1.0:
                out[nxt] = y_new
            else:
                powers = np.array([theta, theta**2, theta**3, theta**4])
                out[nxt] = y + h * (K.T @ (P @ powers))
            nxt += 1
        if guard is not None:
            guard(t_new, y_new)
        t, y = t_new, y_new
        K[0] = K_new
        steps += 1
        h *= factor
    return OdeResult(t_eval, out, steps, rejected, nfev)


def integrate(
    dc: DerivedConstants,
    init: OdeState,
    grid: Sequence[float],
    *,
    rtol: float = 1e-10,
    atol: float = 1e-13,
    step: float | None = None,
) -> Trajectory:
    """Integrate the dynamical system from ``init`` and sample it on ``grid``.

    Raises:
        Departed: u left (0, 1).
        StepUnderflow: the step size collapsed.
    """
    y0 = np.array([np.log(init.k), np.log(init.h), np.log(init.c), init.u,
                   np.log(init.lambda_rel), np.log(init.mu_rel)])

    def guard(t: float, y: np.ndarray) -> None:
        if not 0.0 < y[3] < 1.0:
            raise Departed(t, float(y[3]))

    res = dormand_prince(_log_rhs(dc), y0, grid, rtol=rtol, atol=atol, step=step, guard=guard)
    k, h, c = np.exp(res.y[:, 0]), np.exp(res.y[:, 1]), np.exp(res.y[:, 2])
    u = res.y[:, 3]
    cols = {
        "z": h * u / k,
        "k": k,
        "h": h,
        "c": c,
        "u": u,
        "c_over_k": c / k,
        "lambda_rel": np.exp(res.y[:, 4]),
        "mu_rel": np.exp(res.y[:, 5]),
    }
    return Trajectory(np.asarray(res.t, dtype=float), cols)


@dataclass
class ColumnError:
    max_abs: float
    max_rel: float
    t_at_max_rel: float


@dataclass
class ErrorReport:
    columns: dict[str, ColumnError]

    @property
    def max_rel(self) -> float:
        return max((e.max_rel for e in self.columns.values()), default=0.0)

    def __str__(self) -> str:
        rows = [f"{'column':>12} {'max abs':>12} {'max rel':>12} {'at t':>10}"]
        for name, e in self.columns.items():
            rows.append(f"{name:>12} {e.max_abs:12.3e} {e.max_rel:12.3e} {e.t_at_max_rel:10.4g}")
        return "\n".join(rows)


def compare(a: Trajectory, b: Trajectory, columns: Sequence[str] | None = None) -> ErrorReport:
    """Per-column deviation of ``b`` from ``a`` (relative to |a|)."""
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise GridMismatch()
    if columns is None:
        columns = [n for n in a.columns if n in b.columns]
    out = {}
    for name in columns:
        x, y = a[name], b[name]
        diff = np.abs(x - y)
        rel = diff / np.abs(x)
        i = int(np.argmax(rel))
        out[name] = ColumnError(float(diff.max()), float(rel[i]), float(a.grid[i]))
    return ErrorReport(out)
