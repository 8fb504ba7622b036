"""Exception hierarchy.

Input problems derive from :class:`ParamError`; regime and root-finding
failures that stop a calibration derive from :class:`CalibrationError`;
broken runtime invariants derive from :class:`InvariantError`.  The CLI maps
these three families onto exit codes 2, 3 and 4.
"""

from __future__ import annotations


class UlkError(Exception):
    """Base class for every error raised by this package."""


class ParamError(UlkError, ValueError):
    """Invalid model input."""


class MissingKey(ParamError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing parameter {name!r}")


class OutOfRange(ParamError):
    def __init__(self, name: str, value: float, bound: str):
        self.name = name
        self.value = value
        self.bound = bound
        super().__init__(f"{name}={value!r} violates {bound}")


class SigmaEqualsBeta(ParamError):
    def __init__(self, sigma: float, beta: float):
        self.sigma = sigma
        self.beta = beta
        super().__init__(f"sigma={sigma!r} equals beta={beta!r}; the model excludes sigma == beta")


class InvalidParams(ParamError):
    """Several bounds violated at once; ``violations`` lists each of them."""

    def __init__(self, violations: list[ParamError]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class EtaSingular(ParamError):
    def __init__(self, eta: float):
        self.eta = eta
        super().__init__(f"eta={eta!r} is numerically zero; the alternative formulation is undefined")


class CalibrationError(UlkError):
    """The initial control cannot be determined for these inputs."""


class NonconvergentIntegralRegime(CalibrationError):
    def __init__(self, xi: float):
        self.xi = xi
        super().__init__(f"xi={xi!r} <= 0: the weighted integrals A(t), B(t) have no finite limit")


class DivergentB(CalibrationError):
    def __init__(self, rate: float):
        self.rate = rate
        super().__init__(f"xi - varphi = {rate!r} <= 0: B* diverges")


class ToleranceUnreachable(CalibrationError):
    def __init__(self, tol: float, achieved: float, evaluations: int):
        self.tol = tol
        self.achieved = achieved
        self.evaluations = evaluations
        super().__init__(
            f"quadrature stopped after {evaluations} evaluations with error estimate "
            f"{achieved:.3e} > tol {tol:.3e}"
        )


class NoBracket(CalibrationError):
    def __init__(self, samples: list[tuple[float, float]]):
        self.samples = samples
        super().__init__("residual G(u0) has no sign change on the scan\n" + format_scan(samples))


class MultipleBrackets(CalibrationError):
    def __init__(self, samples: list[tuple[float, float]], brackets: list[tuple[float, float]]):
        self.samples = samples
        self.brackets = brackets
        super().__init__(
            f"residual G(u0) changes sign {len(brackets)} times on the scan\n" + format_scan(samples)
        )


class InadmissibleSteadyState(CalibrationError):
    def __init__(self, u_star: float):
        self.u_star = u_star
        super().__init__(f"steady-state labour share u*={u_star!r} lies outside (0, 1]")


class InvariantError(UlkError):
    """A numerical invariant failed at run time."""


class DenominatorVanished(InvariantError):
    def __init__(self, t: float):
        self.t = t
        super().__init__(f"denominator of u(t) is non-positive at t={t!r}; u0 is not on the saddle path")


class StepUnderflow(InvariantError):
    def __init__(self, t: float, h: float):
        self.t = float(t)
        self.h = float(h)
        super().__init__(f"step size {self.h!r} underflowed at t={self.t!r}")


class Departed(InvariantError):
    def __init__(self, t: float, u: float):
        self.t = float(t)
        self.u = float(u)
        super().__init__(f"labour share left (0, 1) at t={self.t!r} (u={self.u!r})")


class GridMismatch(InvariantError):
    def __init__(self, msg: str = "trajectories are sampled on different grids"):
        super().__init__(msg)


def format_scan(samples: list[tuple[float, float]]) -> str:
    lines = ["        u0              G(u0)"]
    lines += [f"  {u:.12f}  {g: .6e}" for u, g in samples]
    return "\n".join(lines)
