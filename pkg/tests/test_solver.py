import numpy as np
import pytest
from scipy import sparse

from cerenkov_fiber.hamiltonian import build_fiber_hamiltonian, FiberParams
from cerenkov_fiber.solver import EigensolverError, lowest_eigenpairs


def test_diagonal_matrix_picks_smallest():
    mat = sparse.diags([3.0, 1.0, 2.0]).tocsr()
    res = lowest_eigenpairs(mat, 1, tol=1e-12)
    assert res.eigenvalues[0] == 1.0
    assert res.eigenvectors[:, 0] == pytest.approx([0.0, 1.0, 0.0])
    assert res.method == "diagonal"
    assert res.residual_norms[0] == 0.0


def test_two_by_two_resonant_closed_form(single_mode_setup):
    grid, basis, ff = single_mode_setup
    g = 0.3
    params = FiberParams(P=(1.5, 0, 0), g=g, grid=grid, basis=basis, form_factor=ff)
    h = build_fiber_hamiltonian(params)
    res = lowest_eigenpairs(h, 1, tol=1e-12)
    coupling = g * np.sqrt(0.3) * ff.value(1.0)
    assert res.eigenvalues[0] == pytest.approx(1.125 - coupling, abs=1e-12)


def test_dense_and_iterative_agree_on_random_symmetric():
    rng = np.random.default_rng(42)
    a = rng.normal(size=(200, 200))
    sym = (a + a.T) / 2.0
    dense = lowest_eigenpairs(sym, 5, tol=1e-9, method="dense")
    lanczos = lowest_eigenpairs(sparse.csr_matrix(sym), 5, tol=1e-9, method="lanczos")
    assert lanczos.eigenvalues == pytest.approx(dense.eigenvalues, abs=1e-8)
    assert lanczos.method == "lanczos"
    assert np.all(lanczos.residual_norms <= 1e-9)


def test_eigenvectors_orthonormal(small_model):
    h = small_model.hamiltonian(small_model.on_axis(0.5), 0.2)
    res = lowest_eigenpairs(h, 4, tol=1e-10, method="dense")
    gram = res.eigenvectors.T @ res.eigenvectors
    assert gram == pytest.approx(np.eye(4), abs=1e-10)
    assert np.all(np.diff(res.eigenvalues) >= -1e-12)


def test_residuals_verified(small_model):
    h = small_model.hamiltonian(small_model.on_axis(0.4), 0.1)
    res = lowest_eigenpairs(h, 2, tol=1e-9)
    mat = h.matrix
    for j in range(2):
        v = res.eigenvectors[:, j]
        r = np.linalg.norm(mat @ v - res.eigenvalues[j] * v)
        assert r <= 1e-9
        assert res.residual_norms[j] == pytest.approx(r, abs=1e-12)


def test_nonconvergence_raises_with_partials():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(400, 400))
    sym = sparse.csr_matrix((a + a.T) / 2.0)
    with pytest.raises(EigensolverError) as err:
        lowest_eigenpairs(sym, 6, tol=1e-13, method="lanczos", maxiter=2)
    # the error carries whatever converged, possibly nothing
    assert err.value.best_eigenvalues is not None


def test_count_validation():
    mat = sparse.diags([1.0, 2.0]).tocsr()
    with pytest.raises(ValueError):
        lowest_eigenpairs(mat, 0, tol=1e-9)
    with pytest.raises(ValueError):
        lowest_eigenpairs(mat, 5, tol=1e-9)
    with pytest.raises(ValueError):
        lowest_eigenpairs(mat, 1, tol=-1.0)


def test_deterministic_lanczos_runs():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(300, 300))
    sym = sparse.csr_matrix((a + a.T) / 2.0)
    r1 = lowest_eigenpairs(sym, 3, tol=1e-10, method="lanczos")
    r2 = lowest_eigenpairs(sym, 3, tol=1e-10, method="lanczos")
    assert np.array_equal(r1.eigenvalues, r2.eigenvalues)
    assert np.array_equal(r1.eigenvectors, r2.eigenvectors)
