"""Numerical s-wave bound states of u'' + 2 mu (E - V(r)) u = 0.

Two independent discretizations are available: a second-order
finite-difference Hamiltonian diagonalized as a symmetric tridiagonal
matrix, and fourth-order Numerov shooting with log-derivative matching at
the outermost classical turning point. Both impose u(r_min) = u(r_max) = 0
on a uniform grid and work in the raw hbar = 1 convention unless a
:class:`~ecsm.molecules.UnitConvention` says otherwise.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal

from .molecules import RAW_PAPER, MoleculeRecord, UnitConvention
from .potential import PotentialSpec, PotentialVariant, evaluate
from .spectrum import SpectrumError, SpectrumVariant, spectrum_range

Potential = Union[PotentialSpec, Callable[[np.ndarray], np.ndarray]]


class OracleDomainError(ValueError):
    pass


class SearchError(RuntimeError):
    pass


class Method(enum.Enum):
    FD = "fd"
    NUMEROV = "numerov"


@dataclass(frozen=True)
class SolverConfig:
    """Grid and search settings. ``tol`` is a relative eigenvalue tolerance."""

    method: Method = Method.FD
    r_min: float = 1e-6
    r_max: float = 30.0
    n_grid: int = 8000
    max_levels: int = 5
    tol: float = 1e-12
    refine: bool = True

    def __post_init__(self) -> None:
        if not (0 < self.r_min < self.r_max):
            raise ValueError(f"need 0 < r_min < r_max, got {self.r_min}, {self.r_max}")
        if self.n_grid < 100:
            raise ValueError("n_grid must be >= 100")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_grid)

    def doubled(self) -> "SolverConfig":
        """Same box with the spacing halved."""
        return replace(self, n_grid=2 * self.n_grid - 1, refine=False)


def default_config(method: Method, delta: float | None = None, **overrides) -> SolverConfig:
    r_max = 30.0 if not delta else max(30.0, 50.0 / delta)
    n_grid = 8000 if method is Method.FD else 20000
    params = dict(method=method, r_max=r_max, n_grid=n_grid)
    params.update(overrides)
    return SolverConfig(**params)


@dataclass(frozen=True)
class Convergence:
    abs_change: float
    rel_change: float


@dataclass
class RadialSolution:
    energy: float
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    node_count: int
    method: Method
    converged: Convergence | None = None


def shifted_morse(de: float, delta: float, r_e: float) -> Callable[[np.ndarray], np.ndarray]:
    """Morse well De (e^{-2 d (r - r_e)} - 2 e^{-d (r - r_e)}) centred at r_e.

    Its spectrum on the full line is
    E_n = -De + d sqrt(2 De / mu) (n + 1/2) - d^2 (n + 1/2)^2 / (2 mu).
    """

    def v(r):
        x = np.exp(-delta * (np.asarray(r, dtype=float) - r_e))
        return de * (x * x - 2.0 * x)

    return v


def morse_levels(de: float, delta: float, mu: float) -> list[float]:
    """All bound levels of the full-line Morse well, hbar = 1."""
    lam = math.sqrt(2.0 * mu * de) / delta
    out = []
    n = 0
    while n + 0.5 < lam:
        x = n + 0.5
        out.append(-de + delta * math.sqrt(2.0 * de / mu) * x - delta**2 * x * x / (2.0 * mu))
        n += 1
    return out


def _potential_on_grid(potential: Potential, r: np.ndarray) -> np.ndarray:
    if isinstance(potential, PotentialSpec):
        v = evaluate(potential, r)
    else:
        v = np.asarray(potential(r), dtype=float)
    v = np.broadcast_to(v, r.shape).astype(float)
    if not np.all(np.isfinite(v)):
        raise OracleDomainError("potential is not finite on the grid")
    return v


def _count_nodes(u: np.ndarray) -> int:
    big = u[np.abs(u) > 1e-10 * np.abs(u).max()]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


def _finish(u: np.ndarray, r: np.ndarray) -> np.ndarray:
    u = u / math.sqrt(trapezoid(u * u, r))
    lead = np.flatnonzero(np.abs(u) > 1e-3 * np.abs(u).max())[0]
    return -u if u[lead] < 0 else u


def _window(v: np.ndarray) -> tuple[float, float]:
    vmin = float(v.min())
    return vmin - abs(vmin) * 1e-3, 0.0


def _attach_convergence(coarse: list[RadialSolution], fine: list[RadialSolution]) -> None:
    for a, b in zip(coarse, fine):
        d = abs(a.energy - b.energy)
        a.converged = Convergence(d, d / abs(b.energy))


def solve_fd(potential: Potential, mu: float, config: SolverConfig, units: UnitConvention = RAW_PAPER) -> list[RadialSolution]:
    """Lowest ``config.max_levels`` negative eigenpairs of -(1/2mu) D2 + V."""
    m = units.scaled_mass(mu)
    r = config.grid
    h = r[1] - r[0]
    v = _potential_on_grid(potential, r)
    t = 1.0 / (2.0 * m * h * h)
    diag = 2.0 * t + v[1:-1]
    off = np.full(diag.size - 1, -t)
    k = min(config.max_levels, diag.size) - 1
    evals, evecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, k))
    out = []
    for i, e in enumerate(evals):
        if e >= 0:
            break
        u = np.zeros_like(r)
        u[1:-1] = evecs[:, i]
        u = _finish(u, r)
        out.append(RadialSolution(float(e), r, u, _count_nodes(u), Method.FD))
    if config.refine and out:
        _attach_convergence(out, solve_fd(potential, mu, config.doubled(), units))
    return out


# extrapolation of a smooth function to node 0 from nodes 1..5
_START = (5.0, -10.0, 10.0, -5.0, 1.0)


class _Numerov:
    """Shooting machinery for one potential on one grid."""

    def __init__(self, r: np.ndarray, v: np.ndarray, m: float):
        self.r = r
        self.v = v
        self.h = r[1] - r[0]
        self.c = self.h * self.h * 2.0 * m / 12.0
        self.n = r.size

    def _coefficients(self, e: float) -> list[float]:
        # a_i = 1 - h^2 f_i / 12 with f = 2 m (V - E)
        return (1.0 - self.c * (self.v - e)).tolist()

    @staticmethod
    def _startup(a: list[float], y1: float) -> list[float]:
        """y_2..y_5 with the boundary f*u replaced by its extrapolation.

        With V singular at the origin (Coulomb-like) f*u has a nonzero
        limit there, and dropping it costs two orders of accuracy.
        Solves the first len(_START) Numerov stencils simultaneously.
        """
        p = len(_START)
        g = [1.0 - x for x in a[: p + 2]]
        m = np.zeros((p, p))
        rhs = np.zeros(p)
        # stencil at node i: (1 - g_{i+1}) y_{i+1} - (2 + 10 g_i) y_i + (1 - g_{i-1}) y_{i-1} = 0
        for row, i in enumerate(range(1, p + 1)):
            for j, coef in ((i + 1, 1.0 - g[i + 1]), (i, -(2.0 + 10.0 * g[i])), (i - 1, 1.0 - g[i - 1])):
                if j == 0:
                    continue  # y_0 = 0
                if j == 1:
                    rhs[row] -= coef * y1
                else:
                    m[row, j - 2] += coef
        # g_0 y_0 -> sum_j c_j g_j y_j enters the first stencil with a minus sign
        for j, c in enumerate(_START, start=1):
            if j == 1:
                rhs[0] += c * g[1] * y1
            else:
                m[0, j - 2] -= c * g[j]
        return np.linalg.solve(m, rhs).tolist()

    def matching_point(self, e: float) -> int:
        allowed = np.flatnonzero(self.v <= e)
        # a well narrower than two grid spacings holds no resolvable level
        if allowed.size == 0 or allowed[-1] < 2:
            return -1
        return int(min(allowed[-1], self.n - 3))

    def shoot(self, e: float, keep: bool = False):
        """Return (nodes, mismatch, u) of the stitched solution at energy ``e``.

        The mismatch is u_out[m+1]/u_out[m] - u_in[m+1]/u_in[m], a discrete
        log-derivative difference that decreases through zero at each
        eigenvalue. ``u`` is the stitched solution when ``keep`` is set.
        """
        mp = self.matching_point(e)
        if mp < 0:
            return 0, math.inf, None
        a = self._coefficients(e)
        n = self.n
        huge, tiny = 1e150, 1e-150

        # The stencil is unstable where h^2 f / 12 > 1/12; deep under a
        # steep wall the solution is negligible, so start past that region.
        i0 = 0
        while i0 < mp - 2 and a[i0 + 1] < 11.0 / 12.0:
            i0 += 1
        out = [0.0] * (mp + 2)
        out[i0 + 1] = 1e-20
        first = i0 + 1
        if i0 == 0 and mp >= 5:
            out[2 : 2 + len(_START)] = self._startup(a, out[1])
            first = 1 + len(_START)
        nodes = 0
        for i in range(i0 + 1, first):
            if (out[i] < 0.0) != (out[i + 1] < 0.0) and out[i] != 0.0 and out[i + 1] != 0.0:
                nodes += 1
        for i in range(first, mp + 1):
            y = ((12.0 - 10.0 * a[i]) * out[i] - a[i - 1] * out[i - 1]) / a[i + 1]
            if i + 1 <= mp and (y < 0.0) != (out[i] < 0.0) and y != 0.0 and out[i] != 0.0:
                nodes += 1
            out[i + 1] = y
            if abs(y) > huge:
                for j in range(i + 2):
                    out[j] *= tiny
        ratio_out = out[mp + 1] / out[mp]

        i1 = n - 1
        while i1 > mp + 3 and a[i1 - 1] < 11.0 / 12.0:
            i1 -= 1
        off = mp - 1
        inw = [0.0] * (n - off)  # inw[j] holds u at grid index off + j
        inw[i1 - 1 - off] = 1e-20
        for i in range(i1 - 1, mp, -1):
            y = ((12.0 - 10.0 * a[i]) * inw[i - off] - a[i + 1] * inw[i + 1 - off]) / a[i - 1]
            prev = inw[i - off]
            if (y < 0.0) != (prev < 0.0) and y != 0.0 and prev != 0.0:
                nodes += 1
            inw[i - 1 - off] = y
            if abs(y) > huge:
                for j in range(i - 1 - off, n - off):
                    inw[j] *= tiny
        ratio_in = inw[mp + 1 - off] / inw[mp - off]
        mismatch = ratio_out - ratio_in

        if not keep:
            return nodes, mismatch, None
        u = np.zeros(n)
        u[: mp + 1] = out[: mp + 1]
        u[mp:] = np.asarray(inw[1:]) * (out[mp] / inw[mp - off])
        return nodes, mismatch, u

    def count(self, e: float) -> int:
        """Number of eigenvalues below ``e``."""
        nodes, mismatch, _ = self.shoot(e)
        return nodes + (1 if mismatch < 0 else 0)


def solve_numerov(potential: Potential, mu: float, config: SolverConfig, units: UnitConvention = RAW_PAPER) -> list[RadialSolution]:
    """Eigenvalues by Numerov shooting, bracketed by node count and bisected to ``config.tol``."""
    m = units.scaled_mass(mu)
    r = config.grid
    v = _potential_on_grid(potential, r)
    lo, hi = _window(v)
    if lo >= hi:
        return []
    shooter = _Numerov(r, v, m)

    n_lo = shooter.count(lo)
    n_hi = shooter.count(hi)
    if n_lo != 0 or n_hi < n_lo:
        raise SearchError(f"inconsistent level counts ({n_lo}, {n_hi}) on E in [{lo:.6g}, {hi:.6g})")
    out = []
    for k in range(min(n_hi, config.max_levels)):
        a, b = lo, hi
        while b - a > config.tol * max(abs(a), abs(b)):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            if shooter.count(mid) > k:
                b = mid
            else:
                a = mid
        e = 0.5 * (a + b)
        _, _, u = shooter.shoot(e, keep=True)
        u = _finish(u, r)
        out.append(RadialSolution(e, r, u, _count_nodes(u), Method.NUMEROV))
        lo = a
    if config.refine and out:
        _attach_convergence(out, solve_numerov(potential, mu, config.doubled(), units))
    return out


def solve(potential: Potential, mu: float, config: SolverConfig, units: UnitConvention = RAW_PAPER) -> list[RadialSolution]:
    if config.method is Method.FD:
        return solve_fd(potential, mu, config, units)
    return solve_numerov(potential, mu, config, units)


@dataclass
class LevelComparison:
    n: int
    e_closed: float
    e_oracle: float
    abs_dev: float
    rel_dev: float


@dataclass
class ComparisonReport:
    molecule: str
    variant: str
    method: str
    levels: list[LevelComparison]
    grid: dict
    converged: bool
    n_closed: int = 0
    n_oracle: int = 0
    note: str | None = None
    error: str | None = None

    @property
    def count_mismatch(self) -> bool:
        return self.n_closed != self.n_oracle

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def compare_closed_form(
    molecule: MoleculeRecord,
    variant: SpectrumVariant,
    config: SolverConfig,
    potential: PotentialSpec | None = None,
    n_max: int | None = None,
) -> ComparisonReport:
    """Match closed-form and numerical levels by index and report deviations.

    The default potential is the cosh-of-radius form with C = De * delta.
    Nothing is gated here: the report only measures the disagreement.
    """
    if potential is None:
        potential = PotentialSpec(molecule.de, molecule.delta, variant=PotentialVariant.COSH_OF_RADIUS)
    n_max = config.max_levels - 1 if n_max is None else n_max
    grid = {"r_min": config.r_min, "r_max": config.r_max, "n": config.n_grid}
    report = ComparisonReport(molecule.name, variant.value, config.method.value, [], grid, False)
    try:
        closed = spectrum_range(molecule.mu, molecule.de, molecule.delta, n_max, variant)
    except SpectrumError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report
    numeric = solve(potential, molecule.mu, replace(config, max_levels=max(config.max_levels, len(closed))))
    report.n_closed = len(closed)
    report.n_oracle = len(numeric)
    for lvl, sol in zip(closed, numeric):
        d = abs(lvl.energy - sol.energy)
        report.levels.append(LevelComparison(lvl.n, lvl.energy, sol.energy, d, d / abs(sol.energy)))
    report.converged = bool(numeric) and all(
        s.converged is not None and s.converged.rel_change < 1e-4 for s in numeric[: len(report.levels)]
    )
    if report.count_mismatch:
        report.note = f"level counts differ: closed form {len(closed)}, oracle {len(numeric)}; compared {len(report.levels)}"
    return report
