import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from ecsm.molecules import MoleculeRecord, builtin_table1, lookup
from ecsm.oracle import (
    Method,
    OracleDomainError,
    SolverConfig,
    compare_closed_form,
    default_config,
    morse_levels,
    shifted_morse,
    solve,
)
from ecsm.potential import PotentialSpec, PotentialVariant
from ecsm.spectrum import SpectrumVariant

METHODS = [Method.FD, Method.NUMEROV]


def coulomb(r):
    return -1.0 / r


MORSE = shifted_morse(8.0, 1.0, r_e=2.5)
MORSE_EXACT = [-5.42157287525381, -1.7647186257614287, -0.10786437626904899]


def _config(method, n_grid, **kw):
    return SolverConfig(method=method, n_grid=n_grid, refine=False, **kw)


def test_morse_reference_levels():
    assert morse_levels(8.0, 1.0, 0.5) == pytest.approx(MORSE_EXACT, rel=1e-14)


@pytest.mark.parametrize("method", METHODS)
def test_free_particle_has_no_bound_states(method):
    assert solve(lambda r: np.zeros_like(r), 1.0, _config(method, 2000)) == []
    assert solve(lambda r: np.ones_like(r), 1.0, _config(method, 2000)) == []


@pytest.mark.parametrize("method, n_grid", [(Method.FD, 16000), (Method.NUMEROV, 20000)])
def test_coulomb_levels(method, n_grid):
    sols = solve(coulomb, 1.0, _config(method, n_grid, r_max=200.0, max_levels=3))
    for n, s in enumerate(sols):
        exact = -0.5 / (n + 1) ** 2
        assert abs(s.energy - exact) / abs(exact) < 1e-4
        assert s.node_count == n


@pytest.mark.parametrize("method, n_grid, tol", [(Method.FD, 8000, 1e-4), (Method.NUMEROV, 20000, 1e-5)])
def test_morse_levels(method, n_grid, tol):
    sols = solve(MORSE, 0.5, _config(method, n_grid, max_levels=5))
    assert len(sols) == 3
    for s, exact in zip(sols, MORSE_EXACT):
        assert abs(s.energy - exact) / abs(exact) < tol


def _order(method, potential, mu, grids, **kw):
    e = [solve(potential, mu, _config(method, n, max_levels=1, **kw))[0].energy for n in grids]
    return math.log2(abs(e[0] - e[1]) / abs(e[1] - e[2]))


def test_fd_convergence_order():
    assert 1.8 <= _order(Method.FD, coulomb, 1.0, (2001, 4001, 8001), r_max=200.0) <= 2.2
    assert 1.8 <= _order(Method.FD, MORSE, 0.5, (2001, 4001, 8001)) <= 2.2


def test_numerov_convergence_order():
    assert 3.6 <= _order(Method.NUMEROV, coulomb, 1.0, (4001, 8001, 16001), r_max=200.0, r_min=1e-12) <= 4.4
    assert 3.6 <= _order(Method.NUMEROV, MORSE, 0.5, (1001, 2001, 4001)) <= 4.4


@pytest.mark.parametrize("method", METHODS)
def test_orthonormal_with_node_counts(method):
    sols = solve(MORSE, 0.5, _config(method, 20000))
    for i, a in enumerate(sols):
        assert a.node_count == i
        for j, b in enumerate(sols):
            overlap = trapezoid(a.u * b.u, a.r)
            assert abs(overlap - (1.0 if i == j else 0.0)) < 1e-8


def test_fd_ground_state_bounded_from_above():
    energies = [solve(coulomb, 1.0, _config(Method.FD, n, r_max=200.0, max_levels=1))[0].energy for n in (2000, 4000, 8000)]
    assert energies[0] > energies[1] > energies[2] > -0.5


def test_methods_agree():
    fd = solve(MORSE, 0.5, _config(Method.FD, 100001))
    nu = solve(MORSE, 0.5, _config(Method.NUMEROV, 20000))
    for a, b in zip(fd, nu):
        assert abs(a.energy - b.energy) / abs(b.energy) < 1e-6


def test_refinement_attaches_convergence():
    sols = solve(MORSE, 0.5, SolverConfig(method=Method.FD, n_grid=4000))
    assert all(s.converged is not None and s.converged.rel_change < 1e-3 for s in sols)


def test_potential_spec_input():
    spec = PotentialSpec(1.0, 1.0, -1.0)
    sols = solve(spec, 10.0, _config(Method.FD, 4000))
    assert sols and sols[0].energy < 0


def test_non_finite_potential():
    with pytest.raises(OracleDomainError):
        solve(lambda r: np.where(r > 1, -1.0, np.nan), 1.0, _config(Method.FD, 1000))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(r_min=0.0)
    with pytest.raises(ValueError):
        SolverConfig(n_grid=10)
    assert default_config(Method.FD, delta=0.5).r_max == 100.0
    assert default_config(Method.NUMEROV).n_grid == 20000
    assert SolverConfig(n_grid=1000).doubled().n_grid == 1999


def test_compare_h2_report():
    h2 = lookup(builtin_table1(), "H2")
    report = compare_closed_form(h2, SpectrumVariant.TABLE, default_config(Method.FD, h2.delta, max_levels=3))
    assert report.error is None
    assert report.n_closed == 3
    assert report.levels and report.levels[0].e_closed == pytest.approx(-13.091031, abs=1e-6)
    assert report.levels[0].abs_dev > 1.0
    assert report.count_mismatch and "level counts differ" in report.note
    data = json.loads(report.to_json())
    for key in ("molecule", "variant", "method", "levels", "grid", "converged", "n_closed", "n_oracle"):
        assert key in data


def test_compare_vanishing_well_flags_mismatch():
    mol = MoleculeRecord("weak", 0.5, 1e-8, 1.0)
    pot = PotentialSpec(1e-8, 1.0, variant=PotentialVariant.MORSE_ONLY)
    report = compare_closed_form(mol, SpectrumVariant.MORSE, _config(Method.FD, 2000, max_levels=3), potential=pot)
    assert report.n_closed == 3 and report.n_oracle == 0
    assert report.count_mismatch and report.levels == []


def test_compare_nu_regime_error_is_reported():
    na2 = lookup(builtin_table1(), "Na2")
    report = compare_closed_form(na2, SpectrumVariant.NU, _config(Method.FD, 2000))
    assert report.error is not None and "RegimeError" in report.error
    assert report.levels == []
