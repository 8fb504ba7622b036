import math

import numpy as np
import pytest

from oracles import composite_simpson
from ulk.errors import ToleranceUnreachable
from ulk.quadrature import simpson, simpson_batch


def test_cubic_is_exact():
    r = simpson(lambda x: 3 * x**3 - x + 2, -1.0, 2.0, 1e-12)
    assert r.value == pytest.approx(3 * (16 - 1) / 4 - (4 - 1) / 2 + 2 * 3, abs=1e-13)
    assert r.abs_error_bound <= 1e-12


@pytest.mark.parametrize("tol", [1e-6, 1e-9, 1e-12])
def test_error_within_tolerance(tol):
    exact = 1.0 - math.exp(-5.0) + 0.5 * (1 - math.cos(10.0)) / 2
    r = simpson(lambda x: np.exp(-x) + 0.5 * np.sin(2 * x), 0.0, 5.0, tol)
    assert abs(r.value - exact) <= tol
    assert 0.0 <= r.abs_error_bound <= tol


def test_matches_fixed_step_oracle():
    f = lambda x: np.exp(-0.3 * x) * np.sqrt(1.0 + x)
    r = simpson(f, 0.0, 30.0, 1e-11)
    assert r.value == pytest.approx(composite_simpson(f, 0.0, 30.0, 1 << 16), abs=2e-11)


def test_batch_equals_individual():
    rates = np.array([0.1, 0.5, 2.0])
    a = np.zeros(3)
    b = np.array([1.0, 3.0, 7.0])
    f = lambda x, own: np.exp(-rates[own] * x)
    vals, errs, _ = simpson_batch(f, a, b, np.full(3, 1e-12))
    for j in range(3):
        single = simpson(lambda x: np.exp(-rates[j] * x), a[j], b[j], 1e-12)
        assert vals[j] == pytest.approx(single.value, abs=1e-14)
        assert vals[j] == pytest.approx((1 - math.exp(-rates[j] * b[j])) / rates[j], abs=1e-12)


def test_empty_interval():
    vals, errs, n = simpson_batch(lambda x, o: x, np.array([2.0]), np.array([2.0]), np.array([1e-9]))
    assert vals[0] == 0.0 and errs[0] == 0.0 and n == 0


def test_unreachable_tolerance_raises():
    # integrable singularity inside the interval defeats bisection at this tolerance
    with pytest.raises(ToleranceUnreachable):
        simpson(lambda x: np.abs(x - 0.3) ** -0.9, 0.0, 1.0, 1e-12, max_evaluations=200_000)


def test_reversed_limits_rejected():
    with pytest.raises(ValueError):
        simpson(lambda x: x, 1.0, 0.0, 1e-9)
