import numpy as np
import pytest

from ulk import BENCHMARK, Trajectory
from ulk.io import (
    CSV_HEADER,
    ConfigError,
    format_csv,
    load_params_map,
    parse_csv,
    parse_keyvalue,
    read_calibration,
    read_trajectory_csv,
    trajectory_csv,
    write_calibration,
)


def test_keyvalue_parsing():
    text = "# economy\nbeta = 0.25\n\n  sigma=1.5   # curvature\nk0 = 80\n"
    assert parse_keyvalue(text) == {"beta": "0.25", "sigma": "1.5", "k0": "80"}


@pytest.mark.parametrize("text", ["beta 0.25\n", "= 3\n", "beta = 1\nbeta = 2\n"])
def test_keyvalue_errors(text):
    with pytest.raises(ConfigError):
        parse_keyvalue(text)


def test_flags_override_file(tmp_path):
    cfg = tmp_path / "econ.cfg"
    cfg.write_text("beta = 0.25\nsigma = 1.5\n")
    merged = load_params_map(cfg, {"sigma": 2.0, "beta": None, "rho": 0.03})
    assert merged == {"beta": "0.25", "sigma": 2.0, "rho": 0.03}


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "econ.cfg"
    cfg.write_text("betta = 0.25\n")
    with pytest.raises(ConfigError, match="betta"):
        load_params_map(cfg, {})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_params_map(tmp_path / "nope.cfg", {})


def test_calibration_round_trip(tmp_path, bench_cal):
    path = tmp_path / "cal.txt"
    write_calibration(path, BENCHMARK, bench_cal)
    echo, cal = read_calibration(path)
    assert cal == bench_cal
    assert {k: float(v) for k, v in echo.items()} == BENCHMARK.as_dict()


def test_calibration_missing_key(tmp_path):
    path = tmp_path / "cal.txt"
    path.write_text("u0 = 0.5\n")
    with pytest.raises(ConfigError, match="c0"):
        read_calibration(path)


def test_csv_format():
    text = format_csv(("t", "x"), np.array([[0.0, 0.1], [1.0, 1 / 3]]))
    assert text == "t,x\n0,0.10000000000000001\n1,0.33333333333333331\n"
    assert "\r" not in text


def test_trajectory_csv_layout(bench_traj):
    text = trajectory_csv(bench_traj)
    lines = text.split("\n")
    assert lines[0] == "t,z,k,h,c,u,c_over_k,u_alt,h_alt,lambda_rel,mu_rel"
    assert tuple(lines[0].split(",")) == CSV_HEADER
    assert lines[-1] == "" and len(lines) == 1 + 501 + 1
    # 17 significant digits recover every value exactly
    header, data = parse_csv(text)
    assert np.array_equal(data[:, 2], bench_traj["k"])


def test_csv_round_trip_is_byte_identical(bench_traj, tmp_path):
    text = trajectory_csv(bench_traj)
    path = tmp_path / "t.csv"
    path.write_text(text, newline="")
    again = read_trajectory_csv(path)
    assert trajectory_csv(again) == text


def test_csv_ragged_row():
    with pytest.raises(ConfigError):
        parse_csv("t,x\n0,1\n1\n")


def test_read_csv_needs_t_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,t\n0,1\n")
    with pytest.raises(ConfigError):
        read_trajectory_csv(path)


def test_round_trip_of_awkward_values():
    g = np.array([0.0, 1e-300, 5e300])
    traj = Trajectory(g, {c: np.array([np.pi, -0.0, 2.0**-1074]) for c in CSV_HEADER[1:]})
    text = trajectory_csv(traj)
    assert format_csv(*parse_csv(text)) == text
