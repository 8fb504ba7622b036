"""Closed-form trajectories of the Lucas-Uzawa model.

Everything here is a pointwise evaluation on top of two ingredients: the
logistic-type path of z = hu/k and the weighted integrals

    A(t) = int_0^t z(s)^alpha e^{-xi s} ds,
    B(t) = int_0^t z(s)^alpha e^{-(xi - varphi) s} ds,   alpha = (sigma-beta)/sigma.

Because z is autonomous, the remainders satisfy

    A* - A(t) = e^{-xi t} A*(z(t)),      B* - B(t) = e^{-(xi-varphi) t} B*(z(t)),

where A*(z0) denotes the improper integral started from ratio z0.  The
trajectory formulas are rewritten in terms of these scaled remainders, which
are O(1) for every t; the naive difference A* - A(t) loses all significant
digits once t exceeds a few dozen years.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DenominatorVanished, DivergentB, InvariantError
from .params import DerivedConstants
from .quadrature import QuadratureResult, simpson_batch

DEFAULT_TOL = 1e-12

COLUMNS = ("z", "k", "h", "c", "u", "c_over_k", "u_alt", "h_alt", "lambda_rel", "mu_rel")


@dataclass(frozen=True)
class Calibration:
    """Initial point that pins down every trajectory.

    ``tol`` is the quadrature tolerance used for ``A_star``/``B_star``; path
    evaluations reuse it so that t = 0 reproduces the stored limits bit for bit.
    """

    u0: float
    c0: float
    z0: float
    A_star: float
    B_star: float
    tol: float = DEFAULT_TOL

    def residual(self, dc: DerivedConstants) -> float:
        """(varphi + delta u0) A* - delta u0 B* at the stored limits."""
        d = dc.params.delta
        return (dc.varphi + d * self.u0) * self.A_star - d * self.u0 * self.B_star


@dataclass
class Trajectory:
    grid: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return self.grid.size

    def check_invariants(self, z_rtol: float = 1e-8) -> None:
        """Raise InvariantError unless all columns are positive, u in (0,1) and z = hu/k."""
        for name, col in self.columns.items():
            if not np.all(np.isfinite(col)) or np.any(col <= 0.0):
                i = int(np.argmax(~np.isfinite(col) | (col <= 0.0)))
                raise InvariantError(f"column {name} not positive at t={self.grid[i]!r}")
        for name in ("u", "u_alt"):
            if name in self.columns and np.any(self.columns[name] >= 1.0):
                i = int(np.argmax(self.columns[name] >= 1.0))
                raise InvariantError(f"column {name} >= 1 at t={self.grid[i]!r}")
        if {"z", "h", "u", "k"} <= self.columns.keys():
            gap = np.abs(self["h"] * self["u"] / self["k"] / self["z"] - 1.0)
            if np.max(gap) > z_rtol:
                i = int(np.argmax(gap))
                raise InvariantError(f"z = hu/k broken by {gap[i]:.3e} at t={self.grid[i]!r}")


# ---------------------------------------------------------------------------
# z(t)


def _w(dc: DerivedConstants, z0, t):
    """z(t)^(1-beta), the logistic solution of w' = varphi w - (1-beta) gamma w^2."""
    b = dc.params.beta
    ws = dc.z_star ** (1.0 - b)
    w0 = np.asarray(z0, dtype=float) ** (1.0 - b)
    # e^{-varphi t} only, never its reciprocal
    return ws * w0 / ((ws - w0) * np.exp(-dc.varphi * np.asarray(t, dtype=float)) + w0)


def z_path(dc: DerivedConstants, z0, t):
    """Ratio z = hu/k at time ``t`` (scalar or array) starting from ``z0``."""
    out = _w(dc, z0, t) ** (1.0 / (1.0 - dc.params.beta))
    return float(out) if np.ndim(out) == 0 else out


def z_power_integral(dc: DerivedConstants, z0: float, t):
    """Closed form of int_0^t z(s)^(1-beta) ds.

    With w = z^(1-beta) logistic, the integral is
    (1/(gamma(1-beta))) [varphi t + log1p(a e^{-varphi t}) - log1p(a)],
    a = (w* - w0)/w0.
    """
    p = dc.params
    b = p.beta
    ws = dc.z_star ** (1.0 - b)
    w0 = z0 ** (1.0 - b)
    a = (ws - w0) / w0
    t = np.asarray(t, dtype=float)
    out = (dc.varphi * t + np.log1p(a * np.exp(-dc.varphi * t)) - math.log1p(a)) / (p.gamma * (1.0 - b))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# weighted integrals


def _integrand(dc: DerivedConstants, z0s: np.ndarray, rate: float):
    exponent = dc.alpha / (1.0 - dc.params.beta)

    def f(s, own):
        w = _w(dc, z0s[own], s)
        return np.exp(exponent * np.log(w) - rate * s)

    return f


def _check_rate(dc: DerivedConstants, rate: float) -> None:
    if rate <= 0.0:
        # rate is either xi (rejected in derive_constants) or xi - varphi
        raise DivergentB(rate)


def improper_batch(dc: DerivedConstants, z0s, rate: float, tol: float = DEFAULT_TOL):
    """int_0^inf z(s)^alpha e^{-rate s} ds for every starting ratio in ``z0s``.

    The horizon T_j is chosen so the analytic tail bound
    sup_{s>=T} z^alpha e^{-rate T}/rate is at most tol/2; Simpson handles
    [0, T_j] at tol/2.  Since z is monotone between z(T) and z*, the tail lies
    between the two endpoint envelopes; its midpoint is added to the value and
    the half-width to the bound.

    Returns:
        (values, bounds, horizons) as arrays.
    """
    _check_rate(dc, rate)
    z0s = np.atleast_1d(np.asarray(z0s, dtype=float))
    alpha = dc.alpha
    zs_a = dc.z_star**alpha
    sup0 = np.maximum(z0s**alpha, zs_a)
    horizon = np.maximum(0.0, np.log(2.0 * sup0 / (rate * tol)) / rate)
    vals, errs, _ = simpson_batch(
        _integrand(dc, z0s, rate), np.zeros_like(z0s), horizon, np.full(z0s.shape, tol / 2.0)
    )
    zt_a = z_path(dc, z0s, horizon) ** alpha
    scale = np.exp(-rate * horizon) / rate
    hi = np.maximum(zt_a, zs_a) * scale
    lo = np.minimum(zt_a, zs_a) * scale
    return vals + 0.5 * (hi + lo), errs + 0.5 * (hi - lo), horizon


@lru_cache(maxsize=4096)
def weighted_limit(dc: DerivedConstants, z0: float, rate: float, tol: float = DEFAULT_TOL) -> QuadratureResult:
    """Cached scalar form of :func:`improper_batch`."""
    v, e, T = improper_batch(dc, np.array([z0]), rate, tol)
    return QuadratureResult(float(v[0]), float(e[0]), float(T[0]))


def _weighted_integral(dc: DerivedConstants, z0: float, t: float, rate: float, tol: float) -> QuadratureResult:
    if t < 0.0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return QuadratureResult(0.0, 0.0, 0.0)
    if math.isinf(t):
        return weighted_limit(dc, float(z0), rate, tol)
    vals, errs, n = simpson_batch(
        _integrand(dc, np.array([float(z0)]), rate), np.array([0.0]), np.array([float(t)]), np.array([tol])
    )
    return QuadratureResult(float(vals[0]), float(errs[0]), float(t), n)


def integral_A(dc: DerivedConstants, z0: float, t: float, tol: float = DEFAULT_TOL) -> QuadratureResult:
    """A(t); pass ``t=math.inf`` for A*."""
    return _weighted_integral(dc, z0, t, dc.xi, tol)


def integral_B(dc: DerivedConstants, z0: float, t: float, tol: float = DEFAULT_TOL) -> QuadratureResult:
    """B(t); pass ``t=math.inf`` for B*.  Raises DivergentB when xi <= varphi."""
    _check_rate(dc, dc.xi_minus_varphi)
    return _weighted_integral(dc, z0, t, dc.xi_minus_varphi, tol)


def scaled_tail_A(dc: DerivedConstants, z0: float, t, tol: float = DEFAULT_TOL) -> np.ndarray:
    """e^{xi t} (A* - A(t)), evaluated as A*(z(t))."""
    return improper_batch(dc, z_path(dc, z0, np.atleast_1d(t)), dc.xi, tol)[0]


def scaled_tail_B(dc: DerivedConstants, z0: float, t, tol: float = DEFAULT_TOL) -> np.ndarray:
    """e^{(xi - varphi) t} (B* - B(t)), evaluated as B*(z(t))."""
    return improper_batch(dc, z_path(dc, z0, np.atleast_1d(t)), dc.xi_minus_varphi, tol)[0]


def remainders_on_grid(dc: DerivedConstants, z0: float, grid, rate: float, tol: float = DEFAULT_TOL):
    """Scaled remainders e^{rate t_i} int_{t_i}^inf z^alpha e^{-rate s} ds on a sorted grid.

    Assembled backwards: S_i = int_0^{t_{i+1}-t_i} z(t_i+r)^alpha e^{-rate r} dr
    + e^{-rate (t_{i+1}-t_i)} S_{i+1}, anchored by one improper integral at the
    last grid point.  Every term is positive and the decay factors are below
    one, so the error bound at each point is at most the sum of the piece
    bounds (tol/2 in total) plus the anchor bound (tol/2).  Much cheaper than
    one improper integral per grid point.

    Returns:
        (values, bounds)
    """
    _check_rate(dc, rate)
    t = np.atleast_1d(np.asarray(grid, dtype=float))
    if t.size > 1 and np.any(np.diff(t) <= 0.0):
        raise ValueError("grid must be strictly increasing")
    n = t.size
    zt = z_path(dc, z0, t)
    zt = np.atleast_1d(zt)
    end_val, end_err, _ = improper_batch(dc, zt[-1:], rate, tol / 2.0)
    vals = np.empty(n)
    errs = np.empty(n)
    vals[-1], errs[-1] = end_val[0], end_err[0]
    if n > 1:
        piece_tol = max(tol / (2.0 * (n - 1)), 1e-17)
        exponent = dc.alpha / (1.0 - dc.params.beta)
        starts = t[:-1]

        def f(s, own):
            w = _w(dc, z0, s)
            return np.exp(exponent * np.log(w) - rate * (s - starts[own]))

        pv, pe, _ = simpson_batch(f, starts, t[1:], np.full(n - 1, piece_tol))
        decay = np.exp(-rate * np.diff(t))
        for i in range(n - 2, -1, -1):
            vals[i] = pv[i] + decay[i] * vals[i + 1]
            errs[i] = pe[i] + decay[i] * errs[i + 1]
    return vals, errs


# ---------------------------------------------------------------------------
# trajectories


def _scalar(x, t):
    return float(x[0]) if np.ndim(t) == 0 else x


def consumption_path(dc: DerivedConstants, cal: Calibration, t):
    p = dc.params
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    c = p.h0 * cal.u0 / cal.A_star * z ** (-p.beta / p.sigma) * np.exp(dc.g_bgp * t1)
    return _scalar(c, t)


def _capital(dc, cal, t1, z, tail_a):
    # e^{phi t} e^{-xi t} = e^{g t}
    return dc.params.h0 * cal.u0 / cal.A_star * tail_a / z * np.exp(dc.g_bgp * t1)


def capital_path(dc: DerivedConstants, cal: Calibration, t):
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    return _scalar(_capital(dc, cal, t1, z, scaled_tail_A(dc, cal.z0, t1, cal.tol)), t)


def ck_ratio(dc: DerivedConstants, cal: Calibration, t):
    """c/k = z^alpha e^{-xi t} / (A* - A(t))."""
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    return _scalar(z**dc.alpha / scaled_tail_A(dc, cal.z0, t1, cal.tol), t)


def _u_closed(dc, cal, t1, tail_a, tail_b):
    d = dc.params.delta
    du0 = d * cal.u0
    denom = cal.residual(dc) * np.exp(dc.xi_minus_varphi * t1) + du0 * (tail_b - tail_a)
    bad = ~(denom > 0.0)
    if np.any(bad):
        raise DenominatorVanished(float(t1[int(np.argmax(bad))]))
    return dc.varphi * cal.u0 * tail_a / denom


def u_path(dc: DerivedConstants, cal: Calibration, t):
    """Labour share in goods production.

    Multiplying numerator and denominator of the closed form by e^{xi t}
    gives u = varphi u0 SA / (G e^{(xi-varphi)t} + delta u0 (SB - SA)), with
    SA, SB the scaled remainders and G the u0-equation residual.  The G term
    is kept, so an off-root u0 shows its saddle-path divergence.

    Raises:
        DenominatorVanished: the denominator is non-positive at some t.
    """
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    sa = scaled_tail_A(dc, cal.z0, t1, cal.tol)
    sb = scaled_tail_B(dc, cal.z0, t1, cal.tol)
    return _scalar(_u_closed(dc, cal, t1, sa, sb), t)


def u_on_grid(dc: DerivedConstants, cal: Calibration, grid) -> np.ndarray:
    """:func:`u_path` on a strictly increasing grid, remainders assembled backwards.

    Raises:
        DenominatorVanished
    """
    t = np.atleast_1d(np.asarray(grid, dtype=float))
    sa = remainders_on_grid(dc, cal.z0, t, dc.xi, cal.tol)[0]
    sb = remainders_on_grid(dc, cal.z0, t, dc.xi_minus_varphi, cal.tol)[0]
    return _u_closed(dc, cal, t, sa, sb)


def h_path(dc: DerivedConstants, cal: Calibration, t):
    """h = z k / u."""
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    sa = scaled_tail_A(dc, cal.z0, t1, cal.tol)
    sb = scaled_tail_B(dc, cal.z0, t1, cal.tol)
    u = _u_closed(dc, cal, t1, sa, sb)
    return _scalar(z * _capital(dc, cal, t1, z, sa) / u, t)


def _alt_bracket(dc, z, tail_a):
    # {(A*-A)[gamma beta (1-sigma) - (rho+pi-pi sigma) z^{beta-1}] + sigma z^{beta-beta/sigma} e^{-xi t}}
    # scaled by e^{xi t} and by varphi/eta, which turns the raw coefficients into mu_c, chi_c, omega_c
    b, s = dc.params.beta, dc.params.sigma
    return tail_a * (dc.mu_c - dc.chi_c * z ** (b - 1.0)) + dc.omega_c * z ** (b - b / s)


def u_path_alt(dc: DerivedConstants, cal: Calibration, t):
    """Labour share, second formulation.

    Written with the identity constants: u = (varphi/delta) SA / bracket,
    which is the original expression with numerator and denominator both
    multiplied by varphi/eta.
    """
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    sa = scaled_tail_A(dc, cal.z0, t1, cal.tol)
    return _scalar(dc.varphi / dc.params.delta * sa / _alt_bracket(dc, z, sa), t)


def h_path_alt(dc: DerivedConstants, cal: Calibration, t):
    """Human capital, second formulation; needs c0 and z0."""
    p = dc.params
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    sa = scaled_tail_A(dc, cal.z0, t1, cal.tol)
    scale = p.delta * cal.c0 * cal.z0 ** (p.beta / p.sigma) / dc.varphi
    return _scalar(_alt_bracket(dc, z, sa) * np.exp(dc.g_bgp * t1) * scale, t)


def b_from_a_identity(dc: DerivedConstants, cal: Calibration, t):
    """B(t) rebuilt from A(t):

    (varphi+delta u0)/(delta u0) A* - [A*-A(t)][1+mu_c-chi_c z^{beta-1}] e^{varphi t}
        - omega_c z^{beta-beta/sigma} e^{-(xi-varphi) t}
    """
    p = dc.params
    t1 = np.atleast_1d(np.asarray(t, dtype=float))
    z = z_path(dc, cal.z0, t1)
    sa = scaled_tail_A(dc, cal.z0, t1, cal.tol)
    du0 = p.delta * cal.u0
    decay = np.exp(-dc.xi_minus_varphi * t1)
    bracket = 1.0 + dc.mu_c - dc.chi_c * z ** (p.beta - 1.0)
    out = (
        (dc.varphi + du0) / du0 * cal.A_star
        - sa * bracket * decay
        - dc.omega_c * z ** (p.beta - p.beta / p.sigma) * decay
    )
    return _scalar(out, t)


def costate_paths(dc: DerivedConstants, z0: float, t):
    """Normalised costates (lambda/lambda0, mu/mu0)."""
    p = dc.params
    t1 = np.asarray(t, dtype=float)
    mu_rel = np.exp((p.rho - p.delta) * t1)
    lam_rel = np.exp((p.rho + p.pi) * t1 - p.beta * p.gamma * np.asarray(z_power_integral(dc, z0, t1)))
    if t1.ndim == 0:
        return float(lam_rel), float(mu_rel)
    return lam_rel, mu_rel


def trajectory(dc: DerivedConstants, cal: Calibration, grid) -> Trajectory:
    """Every closed-form column on ``grid``.

    Same formulas as the per-point functions above, but the two scaled
    remainders are computed once for the whole grid by
    :func:`remainders_on_grid`.
    """
    p = dc.params
    t = np.asarray(grid, dtype=float)
    z = np.atleast_1d(z_path(dc, cal.z0, t))
    sa = remainders_on_grid(dc, cal.z0, t, dc.xi, cal.tol)[0]
    sb = remainders_on_grid(dc, cal.z0, t, dc.xi_minus_varphi, cal.tol)[0]
    k = _capital(dc, cal, t, z, sa)
    u = _u_closed(dc, cal, t, sa, sb)
    c = p.h0 * cal.u0 / cal.A_star * z ** (-p.beta / p.sigma) * np.exp(dc.g_bgp * t)
    bracket = _alt_bracket(dc, z, sa)
    lam, mu = costate_paths(dc, cal.z0, t)
    cols = {
        "z": z,
        "k": k,
        "h": z * k / u,
        "c": c,
        "u": u,
        "c_over_k": z**dc.alpha / sa,
        "u_alt": dc.varphi / p.delta * sa / bracket,
        "h_alt": bracket * np.exp(dc.g_bgp * t) * p.delta * cal.c0 * cal.z0 ** (p.beta / p.sigma) / dc.varphi,
        "lambda_rel": np.atleast_1d(lam),
        "mu_rel": np.atleast_1d(mu),
    }
    return Trajectory(t, cols)


def uniform_grid(t_max: float, n_points: int) -> np.ndarray:
    if not t_max > 0.0 or n_points < 2:
        raise ValueError("need t_max > 0 and n_points >= 2")
    return np.linspace(0.0, t_max, n_points)
