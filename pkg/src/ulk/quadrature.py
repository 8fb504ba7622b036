"""Vectorised adaptive Simpson quadrature.

Intervals are refined breadth first: every pass evaluates the integrand on
all still-active sub-intervals at once, so a batch of integrals costs roughly
as many numpy calls as the deepest single one.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ToleranceUnreachable

NOISE_ULPS = 16.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with its error bound.

    ``truncation_T`` is the finite horizon actually integrated; for proper
    integrals it is the upper limit itself.
    """

    value: float
    abs_error_bound: float
    truncation_T: float
    evaluations: int = 0


def simpson_batch(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    tol: np.ndarray,
    *,
    initial_panels: int = 16,
    max_evaluations: int = 50_000_000,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Integrate ``f`` over ``[a[j], b[j]]`` for every j simultaneously.

    ``f(x, owner)`` must accept an array of abscissae together with the index
    of the integral each abscissa belongs to.  A panel of width h carrying
    local tolerance eps is accepted when the two-level Simpson difference D
    satisfies |D| <= 15 eps; its contribution is the Richardson-corrected
    S2 + D/15 and its error estimate |D|/15.  Rejected panels are halved and
    each half inherits eps/2.

    Deep panels can reach a point where D is pure rounding noise.  A panel
    with |D| below NOISE_ULPS ulps of its Simpson sum is accepted as well and
    that noise level is charged to the error estimate; if the charged total
    then exceeds ``tol`` the integral is reported unreachable.

    Returns:
        (values, error_estimates, evaluations)
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    tol = np.broadcast_to(np.asarray(tol, dtype=float), a.shape)
    m = a.size
    values = np.zeros(m)
    errors = np.zeros(m)

    live = b > a
    if not np.any(live):
        return values, errors, 0

    owners0 = np.nonzero(live)[0]
    frac = np.linspace(0.0, 1.0, initial_panels + 1)
    edges = a[owners0, None] + (b[owners0] - a[owners0])[:, None] * frac[None, :]
    lo = edges[:, :-1].ravel()
    hi = edges[:, 1:].ravel()
    own = np.repeat(owners0, initial_panels)
    eps = np.repeat(tol[owners0] / initial_panels, initial_panels)
    mid = 0.5 * (lo + hi)
    flo = f(lo, own)
    fhi = f(hi, own)
    fmid = f(mid, own)
    evaluations = 3 * lo.size
    min_width = 1e-13 * np.maximum(np.abs(b - a), 1.0)
    accepted_own: list[np.ndarray] = []
    accepted_val: list[np.ndarray] = []

    while lo.size:
        left = 0.5 * (lo + mid)
        right = 0.5 * (mid + hi)
        fl = f(left, own)
        fr = f(right, own)
        evaluations += 2 * lo.size
        h = hi - lo
        s1 = h / 6.0 * (flo + 4.0 * fmid + fhi)
        s2 = h / 12.0 * (flo + 4.0 * fl + 2.0 * fmid + 4.0 * fr + fhi)
        diff = s2 - s1
        noise = NOISE_ULPS * _EPS * (h / 12.0) * (np.abs(flo) + 4.0 * np.abs(fl) + 2.0 * np.abs(fmid)
                                                  + 4.0 * np.abs(fr) + np.abs(fhi))
        ok = np.abs(diff) <= np.maximum(15.0 * eps, noise)
        if np.any(ok):
            charged = np.where(np.abs(diff) <= 15.0 * eps, np.abs(diff), np.abs(diff) + noise)[ok] / 15.0
            accepted_own.append(own[ok])
            accepted_val.append((s2 + diff / 15.0)[ok])
            errors += np.bincount(own[ok], weights=charged, minlength=m)
        bad = ~ok
        if not np.any(bad):
            break
        too_small = h[bad] < min_width[own[bad]]
        if evaluations > max_evaluations or np.any(too_small):
            # out of budget: keep the unconverged panels, charged their full
            # two-rule disagreement, and let the total check below decide
            accepted_own.append(own[bad])
            accepted_val.append(s2[bad])
            errors += np.bincount(own[bad], weights=(np.abs(diff) + noise)[bad], minlength=m)
            break
        lo, mid, hi = lo[bad], mid[bad], hi[bad]
        flo, fmid, fhi = flo[bad], fmid[bad], fhi[bad]
        fl, fr, own, half = fl[bad], fr[bad], own[bad], eps[bad] / 2.0
        left, right = left[bad], right[bad]
        lo, mid, hi = np.concatenate([lo, mid]), np.concatenate([left, right]), np.concatenate([mid, hi])
        flo, fmid, fhi = np.concatenate([flo, fmid]), np.concatenate([fl, fr]), np.concatenate([fmid, fhi])
        own = np.concatenate([own, own])
        eps = np.concatenate([half, half])

    values = _exact_sums(accepted_own, accepted_val, m)
    over = errors > tol
    if np.any(over):
        worst = int(np.argmax(np.where(over, errors / tol, 0.0)))
        raise ToleranceUnreachable(float(tol[worst]), float(errors[worst]), evaluations)
    return values, errors, evaluations


def _exact_sums(owners: list[np.ndarray], parts: list[np.ndarray], m: int) -> np.ndarray:
    # correctly rounded per-owner sums; a running float sum over thousands of
    # panels drifts by several ulps of the total
    out = np.zeros(m)
    if not owners:
        return out
    own = np.concatenate(owners)
    val = np.concatenate(parts)
    order = np.argsort(own, kind="stable")
    own, val = own[order], val[order]
    cuts = np.flatnonzero(np.diff(own)) + 1
    for j, chunk in zip(own[np.r_[0, cuts]], np.split(val, cuts)):
        out[j] = math.fsum(chunk)
    return out


def simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, tol: float, **kw) -> QuadratureResult:
    """Adaptive Simpson for a single vectorised integrand on ``[a, b]``."""
    if b < a:
        raise ValueError("simpson requires a <= b")
    vals, errs, n = simpson_batch(lambda x, _own: f(x), np.array([a]), np.array([b]), np.array([tol]), **kw)
    return QuadratureResult(float(vals[0]), float(errs[0]), float(b), n)

