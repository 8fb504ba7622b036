"""Closed-form solution of the Lucas-Uzawa growth model with numerical cross-checks."""

from .params import BENCHMARK, DerivedConstants, ModelParams, derive_constants, sigma_restriction, validate_params
from .closedform import Calibration, Trajectory, trajectory, uniform_grid
from .calibration import build_calibration, solve_u0, steady_state

__all__ = [
    "BENCHMARK",
    "Calibration",
    "DerivedConstants",
    "ModelParams",
    "Trajectory",
    "build_calibration",
    "derive_constants",
    "sigma_restriction",
    "solve_u0",
    "steady_state",
    "trajectory",
    "uniform_grid",
    "validate_params",
]

__version__ = "0.1.0"
