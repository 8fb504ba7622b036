import numpy as np
import pytest

from ulk import BENCHMARK, build_calibration, derive_constants, trajectory, uniform_grid
from ulk.oracle import OdeState, integrate


@pytest.fixture(scope="session")
def bench_dc():
    return derive_constants(BENCHMARK)


@pytest.fixture(scope="session")
def bench_cal(bench_dc):
    return build_calibration(bench_dc)


@pytest.fixture(scope="session")
def grid50():
    return uniform_grid(50.0, 501)


@pytest.fixture(scope="session")
def bench_traj(bench_dc, bench_cal, grid50):
    return trajectory(bench_dc, bench_cal, grid50)


@pytest.fixture(scope="session")
def bench_ode(bench_dc, bench_cal, grid50):
    p = bench_dc.params
    return integrate(bench_dc, OdeState(p.k0, p.h0, bench_cal.c0, bench_cal.u0), grid50)


@pytest.fixture(scope="session")
def raw_bench():
    from oracles import Raw

    return Raw(BENCHMARK)



ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
