"""Screened-Coulomb-plus-Morse potentials and their relatives on r > 0."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq


class PotentialDomainError(ValueError):
    pass


class NoMinimumError(ValueError):
    pass


class PotentialVariant(enum.Enum):
    COSH_OF_RADIUS = "cosh_r"  # D(e^{-2dr} - 2e^{-dr}) - C cosh(dr) e^{-2dr}
    COSH_OF_EXPONENTIAL = "cosh_exp"  # D(e^{-2dr} - 2e^{-dr}) - C cosh(e^{-dr})
    MORSE_ONLY = "morse"
    GECSC = "gecsc"  # -(A/r) e^{-dr} cos(g d r)


@dataclass(frozen=True)
class PotentialSpec:
    """Parameters of one potential curve.

    ``cosh_coupling`` defaults to ``de * delta``. ``de = 0`` with the
    cosh-of-radius variant gives the bare coshine-screened term.
    """

    de: float
    delta: float
    cosh_coupling: float | None = None
    variant: PotentialVariant = PotentialVariant.COSH_OF_RADIUS
    gecsc_strength: float = 1.0
    gecsc_g: float = 1.0
    coupling: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.variant is PotentialVariant.GECSC:
            if not self.delta >= 0:
                raise PotentialDomainError(f"delta must be >= 0 for GECSC, got {self.delta}")
        elif not self.delta > 0:
            raise PotentialDomainError(f"screening parameter delta must be > 0, got {self.delta}")
        c = self.de * self.delta if self.cosh_coupling is None else self.cosh_coupling
        object.__setattr__(self, "coupling", float(c))

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude, used for relative decay checks."""
        if self.variant is PotentialVariant.GECSC:
            return abs(self.gecsc_strength)
        if self.variant is PotentialVariant.MORSE_ONLY:
            return abs(self.de)
        return max(abs(self.de), abs(self.coupling))


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise PotentialDomainError("radius must be > 0")
    return r


def evaluate(spec: PotentialSpec, r):
    """V(r) for scalar or array ``r``; every radius must be strictly positive."""
    r = _check_radius(r)
    d = spec.delta
    if spec.variant is PotentialVariant.GECSC:
        v = -(spec.gecsc_strength / r) * np.exp(-d * r) * np.cos(spec.gecsc_g * d * r)
    else:
        s = np.exp(-d * r)
        v = spec.de * (s * s - 2.0 * s)
        if spec.variant is PotentialVariant.COSH_OF_RADIUS:
            # cosh(dr) e^{-2dr} = (s + s^3) / 2, finite for any r
            v = v - spec.coupling * 0.5 * (s + s**3)
        elif spec.variant is PotentialVariant.COSH_OF_EXPONENTIAL:
            v = v - spec.coupling * np.cosh(s)
    return float(v) if v.ndim == 0 else v


def derivative(spec: PotentialSpec, r):
    """Analytic dV/dr."""
    r = _check_radius(r)
    d = spec.delta
    if spec.variant is PotentialVariant.GECSC:
        a, g = spec.gecsc_strength, spec.gecsc_g
        e = np.exp(-d * r)
        dv = a * e * (np.cos(g * d * r) * (1.0 / r**2 + d / r) + g * d * np.sin(g * d * r) / r)
    else:
        s = np.exp(-d * r)
        # d/dr = -d s d/ds
        dv_ds = spec.de * (2.0 * s - 2.0)
        if spec.variant is PotentialVariant.COSH_OF_RADIUS:
            dv_ds = dv_ds - spec.coupling * 0.5 * (1.0 + 3.0 * s * s)
        elif spec.variant is PotentialVariant.COSH_OF_EXPONENTIAL:
            dv_ds = dv_ds - spec.coupling * np.sinh(s)
        dv = -d * s * dv_ds
    return float(dv) if dv.ndim == 0 else dv


def equilibrium_radius(spec: PotentialSpec, method: str = "numeric", n_scan: int = 20001) -> float:
    """Position of the potential minimum.

    ``method="closed"`` returns ln(1 + C/(2 De)) / delta, the textbook
    closed form with the cosh coupling in place of De*delta. It is not in
    general a stationary point of :func:`evaluate`; see
    :func:`stationarity_residual`.

    ``method="numeric"`` scans (0, 50/delta] and refines the interior grid
    minimum by a root search on dV/dr to 1e-12/delta. A minimum on either
    end of the scan raises :class:`NoMinimumError`.
    """
    if spec.variant not in (PotentialVariant.COSH_OF_RADIUS, PotentialVariant.MORSE_ONLY):
        raise ValueError(f"equilibrium radius is defined for cosh_r and morse variants, not {spec.variant.value}")
    d = spec.delta
    if method == "closed":
        c = 0.0 if spec.variant is PotentialVariant.MORSE_ONLY else spec.coupling
        arg = 1.0 + c / (2.0 * spec.de)
        if arg <= 0:
            raise NoMinimumError("closed form undefined for C/(2 De) <= -1")
        return math.log(arg) / d
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")

    r_hi = 50.0 / d
    r = np.linspace(r_hi / (n_scan - 1), r_hi, n_scan)
    v = evaluate(spec, r)
    i = int(np.argmin(v))
    if i == 0 or i == n_scan - 1:
        raise NoMinimumError(f"no interior minimum on (0, {r_hi:g}]; potential is monotone there")
    return brentq(lambda x: derivative(spec, x), r[i - 1], r[i + 1], xtol=1e-12 / d, rtol=1e-15)


def stationarity_residual(spec: PotentialSpec, r0: float) -> float:
    """|dV/dr| at ``r0``; zero only at a true stationary point."""
    return abs(derivative(spec, r0))


def sample_curve(spec: PotentialSpec, r_min: float, r_max: float, n_points: int) -> list[tuple[float, float]]:
    if not (0 < r_min < r_max):
        raise ValueError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    r = np.linspace(r_min, r_max, n_points)
    v = evaluate(spec, r)
    return [(float(a), float(b)) for a, b in zip(r, v)]


def curve_csv(samples: list[tuple[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "V"])
    for r, v in samples:
        w.writerow([f"{r:.16e}", f"{v:.16e}"])
    return buf.getvalue()
