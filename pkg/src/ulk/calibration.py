"""Determination of the initial labour share u0 and the full calibration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closedform import (
    DEFAULT_TOL,
    Calibration,
    improper_batch,
    remainders_on_grid,
    u_on_grid,
    weighted_limit,
)
from .errors import (
    DenominatorVanished,
    DivergentB,
    InadmissibleSteadyState,
    MultipleBrackets,
    NoBracket,
)
from .params import DerivedConstants

SCAN_POINTS = 64
SCAN_LO = 1e-6
SCAN_HI = 1.0 - 1e-6
ROOT_RTOL = 1e-10


def residual_G(dc: DerivedConstants, u0: float, tol: float = DEFAULT_TOL) -> float:
    """G(u0) = (varphi + delta u0) A*(z0) - delta u0 B*(z0), with z0 = h0 u0 / k0.

    G depends on the endowments only through h0/k0.
    """
    if dc.xi_minus_varphi <= 0.0:
        raise DivergentB(dc.xi_minus_varphi)
    if not 0.0 < u0 < 1.0:
        raise ValueError(f"u0={u0!r} outside (0, 1)")
    p = dc.params
    z0 = p.h0 * u0 / p.k0
    a_star = weighted_limit(dc, z0, dc.xi, tol).value
    b_star = weighted_limit(dc, z0, dc.xi_minus_varphi, tol).value
    return (dc.varphi + p.delta * u0) * a_star - p.delta * u0 * b_star


@dataclass
class ResidualProfile:
    samples: list[tuple[float, float]]
    bracket: tuple[float, float]
    root: float
    residual_at_root: float
    scale: float
    iterations: int = 0
    method: str = "brent"
    final_bracket: tuple[float, float] = field(default=(math.nan, math.nan))

    @property
    def converged(self) -> bool:
        return abs(self.residual_at_root) <= ROOT_RTOL * self.scale


def scan_G(dc: DerivedConstants, n: int = SCAN_POINTS, lo: float = SCAN_LO, hi: float = SCAN_HI,
           tol: float = DEFAULT_TOL) -> list[tuple[float, float]]:
    """(u0, G(u0)) on an even grid; all quadratures run as one batch."""
    if dc.xi_minus_varphi <= 0.0:
        raise DivergentB(dc.xi_minus_varphi)
    p = dc.params
    u = np.linspace(lo, hi, n)
    z0 = p.h0 * u / p.k0
    a_star = improper_batch(dc, z0, dc.xi, tol)[0]
    b_star = improper_batch(dc, z0, dc.xi_minus_varphi, tol)[0]
    g = (dc.varphi + p.delta * u) * a_star - p.delta * u * b_star
    return [(float(x), float(y)) for x, y in zip(u, g)]


def sign_changes(samples: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    for (u1, g1), (u2, g2) in zip(samples, samples[1:]):
        if g1 == 0.0:
            out.append((u1, u1))
        elif g1 * g2 < 0.0:
            out.append((u1, u2))
    if samples and samples[-1][1] == 0.0:
        out.append((samples[-1][0], samples[-1][0]))
    return out


def brent(f: Callable[[float], float], a: float, b: float, fa: float, fb: float,
          xtol: float = 4e-16, maxiter: int = 200):
    """Brent's method on a sign-changing bracket.

    Unlike most library versions this returns the final bracket
    ``((x1, f1), (x2, f2))`` with f1*f2 <= 0 so the caller can choose a side.
    """
    if fa * fb > 0.0:
        raise ValueError("brent needs a sign change")
    if fa == 0.0:
        return (a, fa), (a, fa), 0
    if fb == 0.0:
        return (b, fb), (b, fb), 0
    c, fc = a, fa
    d = e = b - a
    for it in range(1, maxiter + 1):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * np.finfo(float).eps * abs(b) + 0.5 * xtol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return (b, fb), (c, fc), it
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p, q = 2.0 * m * s, 1.0 - s
            else:
                q, r = fa / fc, fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = f(b)
    return (b, fb), (c, fc), maxiter


def bisect(f: Callable[[float], float], a: float, b: float, fa: float, fb: float, xtol: float = 1e-12):
    """Plain bisection; returns the final bracket like :func:`brent`."""
    if fa * fb > 0.0:
        raise ValueError("bisect needs a sign change")
    it = 0
    while abs(b - a) > xtol and it < 200:
        m = 0.5 * (a + b)
        fm = f(m)
        it += 1
        if fm == 0.0:
            return (m, fm), (m, fm), it
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return (a, fa), (b, fb), it


def solve_u0(dc: DerivedConstants, tol: float = DEFAULT_TOL) -> ResidualProfile:
    """Locate the unique root of G on (1e-6, 1 - 1e-6).

    A 64-point scan must show exactly one sign change, which is then refined
    by Brent (bisection if Brent does not meet the residual target).  Of the
    two end points of the final bracket the one with G >= 0 is returned: on
    that side the closed-form u(t) has a positive denominator for every t,
    while G < 0, however small, eventually drives the denominator through
    zero.

    Raises:
        DivergentB, NoBracket, MultipleBrackets
    """
    samples = scan_G(dc, tol=tol)
    changes = sign_changes(samples)
    if not changes:
        raise NoBracket(samples)
    if len(changes) > 1:
        raise MultipleBrackets(samples, changes)
    lo, hi = changes[0]
    glo = dict(samples)[lo]
    ghi = dict(samples)[hi]
    scale = max(1.0, abs(glo), abs(ghi))

    def f(u: float) -> float:
        return residual_G(dc, u, tol)

    if lo == hi:
        return ResidualProfile(samples, (lo, hi), lo, 0.0, scale, 0, "scan", (lo, hi))

    (x1, f1), (x2, f2), its = brent(f, lo, hi, glo, ghi)
    method = "brent"
    if min(abs(f1), abs(f2)) > ROOT_RTOL * scale:
        (x1, f1), (x2, f2), its = bisect(f, lo, hi, glo, ghi, xtol=1e-15)
        method = "bisect"
    candidates = [(x, g) for x, g in ((x1, f1), (x2, f2)) if g >= 0.0]
    root, groot = min(candidates, key=lambda xg: abs(xg[1])) if candidates else min(
        ((x1, f1), (x2, f2)), key=lambda xg: abs(xg[1]))
    return ResidualProfile(samples, (lo, hi), root, groot, scale, its, method, (min(x1, x2), max(x1, x2)))


def calibration_at(dc: DerivedConstants, u0: float, tol: float = DEFAULT_TOL) -> Calibration:
    """Calibration for an arbitrary candidate u0 (on or off the root)."""
    p = dc.params
    z0 = p.h0 * u0 / p.k0
    a_star = weighted_limit(dc, z0, dc.xi, tol).value
    b_star = weighted_limit(dc, z0, dc.xi_minus_varphi, tol).value
    c0 = p.h0 * u0 / a_star * z0 ** (-p.beta / p.sigma)
    return Calibration(u0=u0, c0=c0, z0=z0, A_star=a_star, B_star=b_star, tol=tol)


def build_calibration(dc: DerivedConstants, tol: float = DEFAULT_TOL) -> Calibration:
    return calibration_at(dc, solve_u0(dc, tol).root, tol)


@dataclass(frozen=True)
class SteadyState:
    z_star: float
    u_star: float
    g_bgp: float
    ck_limit: float


def steady_state(dc: DerivedConstants) -> SteadyState:
    """Balanced-growth values.  u* = 1 (delta = rho, zero growth) is accepted.

    Raises:
        InadmissibleSteadyState: u* outside (0, 1].
    """
    u_star = dc.u_star
    if not 0.0 < u_star <= 1.0 + 1e-12:
        raise InadmissibleSteadyState(u_star)
    return SteadyState(dc.z_star, u_star, dc.g_bgp, dc.xi)


@dataclass
class SaddleProbe:
    u0: float
    exit_time: float | None
    u_end: float
    t_end: float


def saddle_probe(dc: DerivedConstants, u0: float, t_max: float = 1000.0, n: int = 2001,
                 tol: float = DEFAULT_TOL) -> SaddleProbe:
    """Evaluate the closed-form u(t) for candidate ``u0`` on a dense grid.

    ``exit_time`` is the first grid time where u leaves (0, 1) or the
    denominator vanishes; None if u stays admissible up to ``t_max``.
    """
    cal = calibration_at(dc, u0, tol)
    t = np.linspace(0.0, t_max, n)
    sa = remainders_on_grid(dc, cal.z0, t, dc.xi, tol)[0]
    sb = remainders_on_grid(dc, cal.z0, t, dc.xi_minus_varphi, tol)[0]
    d = dc.params.delta
    denom = cal.residual(dc) * np.exp(dc.xi_minus_varphi * t) + d * u0 * (sb - sa)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = dc.varphi * u0 * sa / denom
    bad = ~((denom > 0.0) & (u > 0.0) & (u < 1.0))
    if np.any(bad):
        i = int(np.argmax(bad))
        return SaddleProbe(u0, float(t[i]), float(u[i]), float(t[i]))
    return SaddleProbe(u0, None, float(u[-1]), float(t[-1]))


def admissible_on(dc: DerivedConstants, cal: Calibration, t_max: float, n: int = 2001) -> bool:
    """True iff the closed-form u(t) stays in (0, 1) on [0, t_max]."""
    try:
        u = u_on_grid(dc, cal, np.linspace(0.0, t_max, n))
    except DenominatorVanished:
        return False
    return bool(np.all((u > 0.0) & (u < 1.0)))
