"""Model parameters, admissibility checks and the composite constants."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping

from .errors import (
    EtaSingular,
    InvalidParams,
    MissingKey,
    NonconvergentIntegralRegime,
    OutOfRange,
    ParamError,
    SigmaEqualsBeta,
)

PARAM_KEYS = ("beta", "gamma", "delta", "pi", "rho", "sigma", "k0", "h0")

# |sigma - beta| and |eta| below this are treated as zero
EQUALITY_TOL = 1e-12
SIGMA_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Structural parameters and initial endowments.

    Attributes:
        beta: capital share of output, in (0, 1).
        gamma: goods-sector technology level.
        delta: education-sector technology level.
        pi: depreciation rate of physical capital (zero allowed).
        rho: discount rate.
        sigma: inverse elasticity of intertemporal substitution.
        k0: initial physical capital.
        h0: initial human capital.
    """

    beta: float
    gamma: float
    delta: float
    pi: float
    rho: float
    sigma: float
    k0: float
    h0: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


BENCHMARK = ModelParams(beta=0.25, gamma=1.05, delta=0.05, pi=0.01, rho=0.04, sigma=1.5, k0=80.0, h0=10.0)


def validate_params(raw: Mapping[str, float]) -> ModelParams:
    """Build a :class:`ModelParams` from a key/value mapping.

    Every violated bound is collected before raising.  A single violation is
    raised as itself (``MissingKey``, ``OutOfRange`` or ``SigmaEqualsBeta``);
    several are wrapped in :class:`InvalidParams`.
    """
    problems: list[ParamError] = []
    values: dict[str, float] = {}
    for key in PARAM_KEYS:
        if key not in raw:
            problems.append(MissingKey(key))
            continue
        try:
            value = float(raw[key])
        except (TypeError, ValueError):
            problems.append(OutOfRange(key, raw[key], "a finite real number"))
            continue
        if not math.isfinite(value):
            problems.append(OutOfRange(key, value, "a finite real number"))
            continue
        values[key] = value

    bounds = {
        "beta": (lambda v: 0.0 < v < 1.0, "0 < beta < 1"),
        "gamma": (lambda v: v > 0.0, "gamma > 0"),
        "delta": (lambda v: v > 0.0, "delta > 0"),
        "pi": (lambda v: v >= 0.0, "pi >= 0"),
        "rho": (lambda v: v > 0.0, "rho > 0"),
        "sigma": (lambda v: v > 0.0, "sigma > 0"),
        "k0": (lambda v: v > 0.0, "k0 > 0"),
        "h0": (lambda v: v > 0.0, "h0 > 0"),
    }
    for key, (ok, text) in bounds.items():
        if key in values and not ok(values[key]):
            problems.append(OutOfRange(key, values[key], text))

    if "sigma" in values and "beta" in values:
        if abs(values["sigma"] - values["beta"]) <= EQUALITY_TOL:
            problems.append(SigmaEqualsBeta(values["sigma"], values["beta"]))

    if len(problems) == 1:
        raise problems[0]
    if problems:
        raise InvalidParams(problems)
    return ModelParams(**values)


@dataclass(frozen=True)
class DerivedConstants:
    """Composite constants used by the closed-form solution.

    ``varphi`` and ``phi`` are the two distinct growth constants
    (delta+pi)(1-beta)/beta and (delta+pi(1-beta))/beta.  ``mu_c``, ``chi_c``
    and ``omega_c`` express B(t) through A(t); the ``_c`` suffix keeps them
    apart from the human-capital costate.  The originating parameters ride
    along in ``params`` so that path functions need a single argument.
    """

    varphi: float
    phi: float
    xi: float
    eta: float
    mu_c: float
    chi_c: float
    omega_c: float
    z_star: float
    g_bgp: float
    params: ModelParams

    @property
    def alpha(self) -> float:
        """Exponent (sigma - beta)/sigma of z inside A(t) and B(t)."""
        p = self.params
        return (p.sigma - p.beta) / p.sigma

    @property
    def xi_minus_varphi(self) -> float:
        return self.xi - self.varphi

    @property
    def u_star(self) -> float:
        return (self.xi - self.varphi) / self.params.delta


def derive_constants(p: ModelParams) -> DerivedConstants:
    """Compute every composite constant; reject regimes where they break down.

    Raises:
        NonconvergentIntegralRegime: xi <= 0, so A* is infinite.
        EtaSingular: |eta| <= 1e-12, so mu_c, chi_c, omega_c are undefined.
    """
    b, g, d, pi, rho, s = p.beta, p.gamma, p.delta, p.pi, p.rho, p.sigma
    varphi = (d + pi) * (1.0 - b) / b
    phi = (d + pi * (1.0 - b)) / b
    g_bgp = (d - rho) / s
    xi = phi - g_bgp
    if xi <= 0.0:
        raise NonconvergentIntegralRegime(xi)
    eta = g * (1.0 - b) * (rho - d * (1.0 - s))
    if abs(eta) <= EQUALITY_TOL:
        raise EtaSingular(eta)
    mu_c = g * b * varphi * (1.0 - s) / eta
    chi_c = varphi * (rho + pi * (1.0 - s)) / eta
    omega_c = s * varphi / eta
    z_star = ((d + pi) / (b * g)) ** (1.0 / (1.0 - b))
    return DerivedConstants(
        varphi=varphi,
        phi=phi,
        xi=xi,
        eta=eta,
        mu_c=mu_c,
        chi_c=chi_c,
        omega_c=omega_c,
        z_star=z_star,
        g_bgp=g_bgp,
        params=p,
    )


@dataclass(frozen=True)
class SigmaRestriction:
    """Knife-edge sigma; ``sigma_restricted`` is None when infeasible."""

    sigma_restricted: float | None
    matches: bool

    @property
    def feasible(self) -> bool:
        return self.sigma_restricted is not None


def sigma_restriction(p: ModelParams) -> SigmaRestriction:
    """Return the sigma at which the special-case solution family exists.

    sigma = (rho+pi) beta / (pi beta - (delta+pi)(1-beta)), defined only when
    the denominator is positive.
    """
    denom = p.pi * p.beta - (p.delta + p.pi) * (1.0 - p.beta)
    if denom <= 0.0:
        return SigmaRestriction(None, False)
    sigma_r = (p.rho + p.pi) * p.beta / denom
    return SigmaRestriction(sigma_r, abs(sigma_r - p.sigma) <= SIGMA_MATCH_TOL)
