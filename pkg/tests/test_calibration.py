import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Raw, bisect_root
from ulk import BENCHMARK, derive_constants
from ulk import calibration as calm
from ulk.calibration import (
    ROOT_RTOL,
    admissible_on,
    bisect,
    brent,
    build_calibration,
    calibration_at,
    residual_G,
    saddle_probe,
    scan_G,
    sign_changes,
    solve_u0,
    steady_state,
)
from ulk.closedform import ck_ratio, u_path
from ulk.errors import DivergentB, InadmissibleSteadyState, MultipleBrackets, NoBracket

DIVERGENT = dataclasses.replace(BENCHMARK, delta=0.08, rho=0.01, sigma=0.5)


@pytest.fixture(scope="module")
def bench_profile(bench_dc):
    return solve_u0(bench_dc)


# ---------------------------------------------------------------------------
# root finders on known functions


@pytest.mark.parametrize("f, a, b, root", [
    (lambda x: math.cos(x) - x, 0.0, 1.0, 0.7390851332151607),
    (lambda x: x**3 - 2.0, 0.0, 3.0, 2.0 ** (1 / 3)),
    (lambda x: math.exp(x) - 10.0, 0.0, 5.0, math.log(10.0)),
    (lambda x: (x - 0.3) ** 3, 0.0, 1.0, 0.3),
])
def test_brent_and_bisect_known_roots(f, a, b, root):
    (x1, f1), (x2, f2), _ = brent(f, a, b, f(a), f(b))
    assert f1 * f2 <= 0.0
    assert min(abs(x1 - root), abs(x2 - root)) <= 1e-12
    (y1, g1), (y2, g2), _ = bisect(f, a, b, f(a), f(b), xtol=1e-14)
    assert g1 * g2 <= 0.0 and abs(0.5 * (y1 + y2) - root) <= 1e-11


def test_root_finders_need_a_sign_change():
    with pytest.raises(ValueError):
        brent(lambda x: x * x + 1, -1.0, 1.0, 2.0, 2.0)
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1, -1.0, 1.0, 2.0, 2.0)


def test_brent_endpoint_root():
    (x, fx), _, its = brent(lambda x: x - 1.0, 1.0, 2.0, 0.0, 1.0)
    assert x == 1.0 and fx == 0.0 and its == 0


@settings(max_examples=200, deadline=None)
@given(r1=st.floats(-5, 5), r2=st.floats(-5, 5), r3=st.floats(-5, 5))
def test_brent_cubic_roots(r1, r2, r3):
    roots = sorted({r1, r2, r3})
    f = lambda x: (x - r1) * (x - r2) * (x - r3)
    a, b = -6.0, 6.0
    (x1, f1), (x2, f2), _ = brent(f, a, b, f(a), f(b))
    assert f1 * f2 <= 0.0
    x = x1 if abs(f1) <= abs(f2) else x2
    # the bracket closes on one of the roots (or a multiple root, where f is flat)
    assert min(abs(x - r) for r in roots) <= 1e-6 or abs(f(x)) <= 1e-12


def test_sign_changes():
    s = [(0.1, 3.0), (0.2, 1.0), (0.3, -1.0), (0.4, -2.0)]
    assert sign_changes(s) == [(0.2, 0.3)]
    assert sign_changes([(0.1, 1.0), (0.2, 0.0), (0.3, -1.0)]) == [(0.2, 0.2)]
    assert sign_changes([(0.1, 1.0), (0.2, 2.0)]) == []
    assert len(sign_changes([(0.1, 1.0), (0.2, -1.0), (0.3, 1.0)])) == 2


# ---------------------------------------------------------------------------
# G


def test_G_sign_anchor(bench_dc):
    assert residual_G(bench_dc, 1e-6) > 0.0


def test_G_against_hypergeometric(bench_dc):
    raw = Raw(BENCHMARK, bench_dc)
    for u0 in (1e-6, 0.1, 0.5, 0.9, 1 - 1e-6):
        want = float(raw.G(u0))
        assert residual_G(bench_dc, u0) == pytest.approx(want, rel=1e-10, abs=1e-11)


def test_G_rejects_u0_outside_unit_interval(bench_dc):
    for u0 in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            residual_G(bench_dc, u0)


def test_G_divergent_regime():
    dc = derive_constants(DIVERGENT)
    assert dc.xi > 0.0 and dc.xi_minus_varphi <= 0.0
    with pytest.raises(DivergentB):
        residual_G(dc, 0.5)
    with pytest.raises(DivergentB):
        solve_u0(dc)


def test_scan_has_one_sign_change(bench_dc):
    samples = scan_G(bench_dc)
    assert len(samples) == 64
    assert samples[0][0] == pytest.approx(1e-6) and samples[-1][0] == pytest.approx(1 - 1e-6)
    assert len(sign_changes(samples)) == 1
    # the batched scan agrees with one-at-a-time evaluation
    for u0, g in samples[::9]:
        assert g == pytest.approx(residual_G(bench_dc, u0), rel=1e-12, abs=1e-14)


# ---------------------------------------------------------------------------
# solve_u0


def test_benchmark_root(bench_dc, bench_profile):
    prof = bench_profile
    assert 0.0 < prof.root < 1.0
    assert prof.converged
    assert abs(prof.residual_at_root) <= ROOT_RTOL * prof.scale
    lo, hi = prof.bracket
    g = dict(prof.samples)
    assert g[lo] * g[hi] < 0.0 and lo <= prof.root <= hi


def test_root_against_bisection_oracle(bench_dc, bench_profile):
    raw = Raw(BENCHMARK, bench_dc)
    lo, hi = bench_profile.bracket
    oracle = bisect_root(lambda u: float(raw.G(u)), lo, hi, 1e-12)
    assert abs(bench_profile.root - oracle) <= 1e-9


def test_root_sits_on_nonnegative_side(bench_profile):
    assert bench_profile.residual_at_root >= 0.0
    a, b = bench_profile.final_bracket
    assert a <= bench_profile.root <= b
    # an exact zero ends Brent early without narrowing the bracket
    assert bench_profile.residual_at_root == 0.0 or b - a <= 1e-12


def test_root_keeps_u_admissible_to_1000(bench_dc, bench_cal):
    assert admissible_on(bench_dc, bench_cal, 1000.0)
    probe = saddle_probe(bench_dc, bench_cal.u0)
    assert probe.exit_time is None


@pytest.mark.parametrize("shift", [-1e-3, 1e-3])
def test_nudged_u0_leaves_saddle_path(bench_dc, bench_cal, shift):
    probe = saddle_probe(bench_dc, bench_cal.u0 + shift)
    u_star = bench_dc.u_star
    assert probe.exit_time is not None or abs(probe.u_end - u_star) > 1e-3


def test_no_bracket_reported_with_table(bench_dc, monkeypatch):
    fake = [(u, 1.0 + u) for u in np.linspace(1e-6, 1 - 1e-6, 64)]
    monkeypatch.setattr(calm, "scan_G", lambda dc, tol=None: fake)
    with pytest.raises(NoBracket) as info:
        solve_u0(bench_dc)
    assert info.value.samples == fake


def test_multiple_brackets_surface(bench_dc, monkeypatch):
    u = np.linspace(1e-6, 1 - 1e-6, 64)
    fake = [(float(x), float(math.cos(12 * x))) for x in u]
    monkeypatch.setattr(calm, "scan_G", lambda dc, tol=None: fake)
    with pytest.raises(MultipleBrackets):
        solve_u0(bench_dc)


# ---------------------------------------------------------------------------
# calibration


def test_c0_window(bench_dc, bench_cal):
    p = BENCHMARK
    assert bench_cal.c0 > 0.0 and 0.0 < bench_cal.c0 / p.k0 < 1.0
    assert bench_cal.c0 == pytest.approx(float(ck_ratio(bench_dc, bench_cal, 0.0)) * p.k0, rel=1e-12)
    assert bench_cal.z0 == pytest.approx(p.h0 * bench_cal.u0 / p.k0, rel=1e-15)


def test_calibration_against_raw(bench_dc, bench_cal):
    raw = Raw(BENCHMARK, bench_dc)
    paths = raw.paths(bench_cal.u0, 0)
    assert bench_cal.A_star == pytest.approx(float(paths["A_star"]), rel=1e-11)
    assert bench_cal.B_star == pytest.approx(float(paths["B_star"]), rel=1e-11)
    assert bench_cal.c0 == pytest.approx(float(paths["c0"]), rel=1e-11)


def test_bgp_endowment_gives_ck_xi():
    dc0 = derive_constants(BENCHMARK)
    p = dataclasses.replace(BENCHMARK, h0=BENCHMARK.k0 * dc0.z_star / dc0.u_star)
    dc = derive_constants(p)
    cal = build_calibration(dc)
    assert cal.u0 == pytest.approx(dc.u_star, rel=1e-9)
    assert cal.z0 == pytest.approx(dc.z_star, rel=1e-9)
    assert float(ck_ratio(dc, cal, 0.0)) == pytest.approx(dc.xi, rel=1e-9)
    # A* for constant z is z*^alpha / xi
    assert cal.A_star == pytest.approx(dc.z_star ** dc.alpha / dc.xi, rel=1e-9)


@pytest.mark.parametrize("factor", [2.0, 0.1, 37.5])
def test_joint_endowment_scaling(bench_dc, bench_cal, factor):
    p = dataclasses.replace(BENCHMARK, h0=BENCHMARK.h0 * factor, k0=BENCHMARK.k0 * factor)
    cal = build_calibration(derive_constants(p))
    assert cal.u0 == pytest.approx(bench_cal.u0, rel=1e-12)
    assert cal.z0 == pytest.approx(bench_cal.z0, rel=1e-12)
    assert cal.c0 / p.k0 == pytest.approx(bench_cal.c0 / BENCHMARK.k0, rel=1e-12)
    assert cal.c0 == pytest.approx(factor * bench_cal.c0, rel=1e-12)


def test_u_starts_at_root(bench_dc, bench_cal):
    assert float(u_path(bench_dc, bench_cal, 0.0)) == pytest.approx(bench_cal.u0, rel=1e-12)


# ---------------------------------------------------------------------------
# steady state


def test_benchmark_steady_state(bench_dc):
    ss = steady_state(bench_dc)
    assert ss.u_star == pytest.approx(0.86667, abs=5e-6)
    assert ss.g_bgp == pytest.approx(0.0066667, abs=5e-8)
    assert ss.ck_limit == pytest.approx(0.22333, abs=5e-6)
    assert ss.z_star == bench_dc.z_star


def test_zero_growth_when_delta_equals_rho():
    ss = steady_state(derive_constants(dataclasses.replace(BENCHMARK, rho=BENCHMARK.delta)))
    assert ss.g_bgp == 0.0
    assert ss.u_star == pytest.approx(1.0, abs=1e-12)


def test_steady_state_growth_identity(bench_dc):
    d = BENCHMARK.delta
    assert abs(d - bench_dc.xi_minus_varphi - (d - BENCHMARK.rho) / BENCHMARK.sigma) <= 1e-14
    assert abs(d * (1 - steady_state(bench_dc).u_star) - bench_dc.g_bgp) <= 1e-14


def test_inadmissible_steady_state():
    dc = derive_constants(DIVERGENT)
    assert dc.u_star <= 0.0
    with pytest.raises(InadmissibleSteadyState):
        steady_state(dc)


def test_calibration_at_is_pure(bench_dc, bench_cal):
    again = calibration_at(bench_dc, bench_cal.u0)
    assert again == bench_cal
