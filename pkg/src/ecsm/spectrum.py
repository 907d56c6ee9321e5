"""Closed-form Nikiforov-Uvarov bound-state energies.

Five readings are provided:

``TABLE``
    -(d^2/8mu) [1 + 2n + q^2]^2 - De d/2 with q = 4/(d + 2). This is the
    form that regenerates the bundled 23-molecule reference energies and
    is the default.
``LITERAL``
    The same expression with the literal bracket term, q = 8/(d + 2).
``NU``
    The level obtained by actually imposing lambda = lambda_n on the NU
    quantities (requires d > 2 so that i*beta is real).
``CSP`` / ``MORSE``
    The two limiting spectra.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .molecules import RAW_PAPER, UnitConvention


class SpectrumError(ValueError):
    pass


class RegimeError(SpectrumError):
    """The requested quantity is complex-valued for these parameters."""


class NoBoundLevelError(SpectrumError):
    pass


class SpectrumVariant(enum.Enum):
    TABLE = "table"
    LITERAL = "literal"
    NU = "nu"
    CSP = "csp"
    MORSE = "morse"


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    energy: float
    variant: SpectrumVariant

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be >= 0")


REJECTED_BRANCHES = (
    "k = g2 + 2*i*beta*eps, pi(s) = +(i*beta*s + eps)",
    "k = g2 + 2*i*beta*eps, pi(s) = -(i*beta*s + eps)",
    "k = g2 - 2*i*beta*eps, pi(s) = +(i*beta*s - eps)",
)


@dataclass(frozen=True)
class NuTrace:
    """Intermediate NU quantities for one energy, with b = i*beta real.

    ``n`` is the quantum number implied by rounding lambda / (2b) and
    ``residual`` is |lambda - lambda_n| for that n.
    """

    eps2: float
    beta2: float
    gamma2: float
    b: float
    k_plus: float
    k_minus: float
    pi_linear: float
    pi_const: float
    lam: float
    lambda_n: float
    n: int
    residual: float
    selected_branch: str = "k = g2 - 2*i*beta*eps, pi(s) = -i*beta*s + eps"
    rejected_branches: tuple[str, ...] = REJECTED_BRANCHES


def _check_params(mu: float, de: float, delta: float) -> None:
    for name, value in (("mu", mu), ("de", de), ("delta", delta)):
        if not (math.isfinite(value) and value > 0):
            raise SpectrumError(f"{name} must be finite and > 0, got {value!r}")


def _nu_b(m: float, de: float, delta: float) -> float:
    gap = de * delta / 2.0 - de
    if delta <= 2.0 or gap <= 0.0:
        raise RegimeError(f"i*beta is imaginary for delta = {delta} <= 2; the NU form has no real level")
    return math.sqrt(2.0 * m * gap) / delta


def _nu_eps(m: float, de: float, delta: float, n: int) -> tuple[float, float]:
    b = _nu_b(m, de, delta)
    gamma2 = 4.0 * m * de / delta**2
    return (gamma2 - (2 * n + 1) * b) / (2.0 * b), b


def energy(
    mu: float,
    de: float,
    delta: float,
    n: int,
    variant: SpectrumVariant = SpectrumVariant.TABLE,
    units: UnitConvention = RAW_PAPER,
) -> EnergyLevel:
    _check_params(mu, de, delta)
    if n < 0:
        raise SpectrumError("n must be >= 0")
    m = units.scaled_mass(mu)
    shift = de * delta / 2.0

    if variant in (SpectrumVariant.TABLE, SpectrumVariant.LITERAL):
        q = (4.0 if variant is SpectrumVariant.TABLE else 8.0) / (delta + 2.0)
        e = -(delta**2 / (8.0 * m)) * (1.0 + 2 * n + q * q) ** 2 - shift
    elif variant is SpectrumVariant.NU:
        eps, _ = _nu_eps(m, de, delta, n)
        if eps <= 0:
            raise NoBoundLevelError(f"no NU level with n = {n}: eps_n = {eps:.6g} <= 0")
        e = shift - (delta**2 / (2.0 * m)) * eps * eps
    elif variant is SpectrumVariant.CSP:
        e = -(delta**2 / (12.0 * m)) * (n + 0.5) ** 2 - shift
    elif variant is SpectrumVariant.MORSE:
        e = -(delta**2 / (2.0 * m)) * (n + 0.5 + 2.0 * de) ** 2
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return EnergyLevel(n, e, variant)


def spectrum_range(
    mu: float,
    de: float,
    delta: float,
    n_max: int,
    variant: SpectrumVariant = SpectrumVariant.TABLE,
    units: UnitConvention = RAW_PAPER,
) -> list[EnergyLevel]:
    """Levels n = 0..n_max; the NU form stops at its last bound level."""
    if n_max < 0:
        raise SpectrumError("n_max must be >= 0")
    levels = []
    for n in range(n_max + 1):
        try:
            levels.append(energy(mu, de, delta, n, variant, units))
        except NoBoundLevelError:
            if n == 0:
                raise
            break
    return levels


def nu_trace(mu: float, de: float, delta: float, energy_value: float, units: UnitConvention = RAW_PAPER) -> NuTrace:
    _check_params(mu, de, delta)
    m = units.scaled_mass(mu)
    shift = de * delta / 2.0
    eps2 = -(2.0 * m / delta**2) * (energy_value - shift)
    beta2 = -(2.0 * m / delta**2) * (shift - de)
    gamma2 = 4.0 * m * de / delta**2
    if beta2 >= 0:
        raise RegimeError(f"beta^2 = {beta2:.6g} >= 0 (delta <= 2): trace has no real form")
    if eps2 < 0:
        raise SpectrumError(f"energy {energy_value} lies above De*delta/2; eps^2 < 0")
    b = math.sqrt(-beta2)
    eps = math.sqrt(eps2)
    lam = gamma2 - 2.0 * b * eps - b
    n = max(0, round(lam / (2.0 * b)))
    lambda_n = 2.0 * n * b
    return NuTrace(
        eps2=eps2,
        beta2=beta2,
        gamma2=gamma2,
        b=b,
        k_plus=gamma2 + 2.0 * b * eps,
        k_minus=gamma2 - 2.0 * b * eps,
        pi_linear=-b,
        pi_const=eps,
        lam=lam,
        lambda_n=lambda_n,
        n=n,
        residual=abs(lam - lambda_n),
    )
