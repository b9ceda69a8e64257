import numpy as np
import pytest
import scipy.sparse as sp

from adhesive_friction.fem.material import ElementInversionError
from adhesive_friction.fem.solver import SolverConfig, newton_solve


def cubic_system(z, need_tangent):
    R = z**3 + z - np.array([2.0, 10.0])
    K = sp.diags(3 * z**2 + 1).tocsr() if need_tangent else None
    return R, K


def test_newton_converges_quadratically():
    res = newton_solve(cubic_system, np.zeros(2), SolverConfig(rtol=1e-12))
    assert res.converged
    assert np.allclose(res.z, [1.0, 2.0])
    r = res.residuals
    assert r[-1] < 1e-10 * r[0]


def test_consistent_start_reports_one_iteration():
    res = newton_solve(cubic_system, np.array([1.0, 2.0]))
    assert res.converged and res.iterations == 1


def test_line_search_handles_overshoot():
    # arctan: plain Newton diverges from |z0| > 1.39
    def f(z, need):
        return np.arctan(z), (sp.diags(1 / (1 + z**2)).tocsr() if need else None)
    res = newton_solve(f, np.array([3.0]), SolverConfig(rtol=1e-12))
    assert res.converged and abs(res.z[0]) < 1e-10


def test_inversion_in_trial_is_backtracked():
    def f(z, need):
        if z[0] > 1.5:
            raise ElementInversionError("inverted")
        return np.array([z[0] - 1.0]), (sp.identity(1, format="csr") * 1.0 if need else None)
    res = newton_solve(lambda z, n: f(z, n), np.array([0.0]))
    assert res.converged


def test_ptc_crosses_a_fold():
    # R(z) = z^3 - z + 0.5 has no root near the fold at z = 1/sqrt(3) but one at z < -1
    def f(z, need):
        return z**3 - z + 0.5, (sp.diags(3 * z**2 - 1).tocsr() if need else None)
    res = newton_solve(f, np.array([0.6]), SolverConfig(rtol=1e-10), ptc=True)
    assert res.converged
    assert abs(res.z[0]**3 - res.z[0] + 0.5) < 1e-9


def test_singular_tangent_reports_failure():
    def f(z, need):
        return np.array([1.0, 1.0]), (sp.csr_matrix((2, 2)) if need else None)
    res = newton_solve(f, np.zeros(2))
    assert not res.converged


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rtol=0)
