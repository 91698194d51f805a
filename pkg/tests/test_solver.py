import numpy as np
import pytest
import scipy.sparse as sp

from eikonal_fem.fem import CoefficientField, assemble, build_space
from eikonal_fem.mesh import build_lshape
from eikonal_fem.solver import NoConvergence, NotPositiveDefinite, SolverConfig, solve_spd


def test_identity_one_iteration():
    b = np.array([3.0, -1.0, 2.5, 7.0])
    x, st = solve_spd(sp.identity(4, format="csr"), b, SolverConfig(preconditioner="none"))
    assert np.allclose(x, b)
    assert st.iterations == 1


def test_diagonal():
    x, st = solve_spd(sp.diags([1.0, 2.0, 4.0]).tocsr(), np.array([1.0, 2.0, 4.0]))
    assert np.allclose(x, 1.0)
    assert st.final_relative_residual <= 1e-10


@pytest.mark.parametrize("prec", ["none", "jacobi"])
def test_two_by_two(prec):
    A = sp.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
    x, _ = solve_spd(A, np.array([1.0, 2.0]), SolverConfig(preconditioner=prec))
    assert np.allclose(x, [1 / 11, 7 / 11], rtol=1e-10)


def test_zero_rhs():
    x, st = solve_spd(sp.identity(3, format="csr"), np.zeros(3))
    assert np.all(x == 0) and st.iterations == 0


def test_errors():
    A = sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite
    with pytest.raises(NotPositiveDefinite):
        solve_spd(A, np.array([1.0, -1.0]), SolverConfig(preconditioner="none"))
    n = 50
    A = sp.diags(np.linspace(1, 1e4, n)).tocsr()
    with pytest.raises(NoConvergence) as info:
        solve_spd(A, np.ones(n), SolverConfig(max_iters=2, preconditioner="none"))
    assert info.value.iterations == 2
    with pytest.raises(ValueError):
        solve_spd(A, np.ones(3))
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)


@pytest.fixture(scope="module")
def lshape_system():
    s = build_space(build_lshape(0), 1)
    return assemble(s, CoefficientField(1.0, 4.0), 2.0**-3)


def test_residual_tolerance_and_restart(lshape_system):
    A, b = lshape_system.matrix, lshape_system.rhs
    x1, st = solve_spd(A, b, SolverConfig(rel_tol=1e-8))
    assert np.linalg.norm(b - A @ x1) <= 1e-8 * np.linalg.norm(b)
    assert st.final_relative_residual <= 1e-8
    x2, _ = solve_spd(A, b, SolverConfig(rel_tol=1e-11))
    assert np.linalg.norm(x2 - x1) <= 10 * 1e-8 * np.linalg.norm(x1)


def test_preconditioner_invariance(lshape_system):
    A, b = lshape_system.matrix, lshape_system.rhs
    xj, sj = solve_spd(A, b, SolverConfig(preconditioner="jacobi"))
    xn, sn = solve_spd(A, b, SolverConfig(preconditioner="none"))
    assert np.linalg.norm(xj - xn) <= 1e-8 * np.linalg.norm(xj)
    ref = sp.linalg.spsolve(A.tocsc(), b)
    assert np.linalg.norm(xj - ref) <= 1e-8 * np.linalg.norm(ref)
