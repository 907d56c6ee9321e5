"""Associated Laguerre polynomials and the closed-form radial wavefunctions."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import binom

from .molecules import RAW_PAPER, UnitConvention
from .spectrum import RegimeError


class LaguerreDomainError(ValueError):
    pass


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class LaguerreParams:
    n: int
    a: float

    def __post_init__(self) -> None:
        if self.n < 0:
            raise LaguerreDomainError(f"degree must be >= 0, got {self.n}")
        if not self.a > -1:
            raise LaguerreDomainError(f"order must be > -1, got {self.a}")


def laguerre(params: LaguerreParams, x):
    """L_n^a(x) by the three-term recurrence in n.

    (k+1) L_{k+1} = (2k + 1 + a - x) L_k - (k + a) L_{k-1}
    """
    n, a = params.n, params.a
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + a - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def laguerre_series(params: LaguerreParams, x):
    """L_n^a(x) from the explicit finite sum; an independent check on :func:`laguerre`."""
    n, a = params.n, params.a
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for k in range(n + 1):
        total = total + (-1) ** k * binom(n + a, n - k) * x**k / math.factorial(k)
    return total if total.ndim else float(total)


@dataclass(frozen=True)
class WaveSpec:
    """Real-form parameters of one closed-form level.

    ``b`` stands in for i*beta, which is real only when delta > 2.
    """

    mu: float
    de: float
    delta: float
    n: int
    eps: float
    b: float

    def __post_init__(self) -> None:
        if not (self.b > 0 and self.eps > 0):
            raise RegimeError(f"wavefunction needs b > 0 and eps > 0 (got b={self.b}, eps={self.eps})")

    @classmethod
    def from_energy(
        cls, mu: float, de: float, delta: float, n: int, energy: float, units: UnitConvention = RAW_PAPER
    ) -> "WaveSpec":
        m = units.scaled_mass(mu)
        gap = de * delta / 2.0 - de
        if gap <= 0:
            raise RegimeError(f"i*beta is imaginary for delta = {delta} <= 2")
        eps2 = -(2.0 * m / delta**2) * (energy - de * delta / 2.0)
        if eps2 <= 0:
            raise RegimeError(f"energy {energy} is not below De*delta/2")
        return cls(mu, de, delta, n, math.sqrt(eps2), math.sqrt(2.0 * m * gap) / delta)


def reduced_radial(spec: WaveSpec, r):
    """u_n(r) = s^eps exp(-b s) L_n^{2 eps}(2 b s), s = exp(-delta r)."""
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise ValueError("radius must be > 0")
    s = np.exp(-spec.delta * r)
    u = s**spec.eps * np.exp(-spec.b * s) * laguerre(LaguerreParams(spec.n, 2.0 * spec.eps), 2.0 * spec.b * s)
    return u if np.ndim(u) else float(u)


def normalization_constant(r: np.ndarray, u: np.ndarray, tail_tol: float = 1e-14) -> float:
    """N such that the Simpson integral of (N u)^2 over the samples is 1."""
    u2 = np.asarray(u, dtype=float) ** 2
    peak = u2.max()
    if not peak > 0:
        raise CoverageError("function vanishes on the grid")
    if u2[-1] >= tail_tol * peak:
        raise CoverageError(f"tail not converged: u^2(r_max)/max = {u2[-1] / peak:.3g} >= {tail_tol:g}")
    return 1.0 / math.sqrt(simpson(u2, x=r))


def normalize(spec: WaveSpec, r_min: float, r_max: float, n_points: int) -> float:
    r = np.linspace(r_min, r_max, n_points)
    return normalization_constant(r, reduced_radial(spec, r))


def wavefunction_csv(spec: WaveSpec, r_min: float, r_max: float, n_points: int) -> str:
    r = np.linspace(r_min, r_max, n_points)
    u = reduced_radial(spec, r)
    norm = normalization_constant(r, u)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "u", "u_normalized"])
    for ri, ui in zip(r, u):
        w.writerow([f"{ri:.16e}", f"{ui:.16e}", f"{norm * ui:.16e}"])
    return buf.getvalue()
