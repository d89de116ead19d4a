"""Lowest eigenpairs of sparse symmetric operators.

Dense LAPACK diagonalization below a size cutoff, implicitly restarted
Lanczos (ARPACK) above it.  Both paths verify residual norms against the
requested tolerance and fix eigenvector signs for reproducible output files.
The Lanczos starting vector is deterministic for the same reason.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from cerenkov_fiber.hamiltonian import SparseHermitianOperator

DENSE_CUTOFF = 2000


class EigensolverError(RuntimeError):
    """Iterative solve failed; carries the best eigenpair residuals reached."""

    def __init__(self, message, best_eigenvalues=None, best_residuals=None):
        super().__init__(message)
        self.best_eigenvalues = best_eigenvalues
        self.best_residuals = best_residuals


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, unit norm, signs fixed
    residual_norms: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def ground_vector(self) -> np.ndarray:
        return self.eigenvectors[:, 0]


def _as_csr(op):
    if isinstance(op, SparseHermitianOperator):
        return op.matrix
    if sparse.issparse(op):
        return op.tocsr()
    return sparse.csr_matrix(np.asarray(op, dtype=float))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0.0:
            vectors[:, j] = -col
    return vectors


def _residuals(mat, vals, vecs):
    res = mat @ vecs - vecs * vals[None, :]
    return np.linalg.norm(res, axis=0)


def _diagonal_of(mat) -> np.ndarray | None:
    """The diagonal if the matrix is exactly diagonal, else None."""
    if mat.nnz > mat.shape[0]:
        return None
    diag = mat.diagonal()
    off = mat - sparse.diags(diag)
    off.eliminate_zeros()
    return diag if off.nnz == 0 else None


def lowest_eigenpairs(
    op,
    count: int,
    tol: float = 1e-9,
    method: str = "auto",
    maxiter: int | None = None,
    dense_cutoff: int = DENSE_CUTOFF,
) -> SpectralResult:
    """Algebraically smallest `count` eigenpairs of a symmetric operator.

    `method` is one of "auto", "dense", "lanczos".  Auto uses dense LAPACK up
    to `dense_cutoff` rows.  Raises :class:`EigensolverError` when the
    iterative path fails to reach the tolerance, carrying the best residuals.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    mat = _as_csr(op)
    dim = mat.shape[0]
    diag = _diagonal_of(mat) if method == "auto" else None
    if diag is not None:
        # exactly diagonal (e.g. g = 0): occupation states are eigenvectors
        if not 0 < count <= dim:
            raise ValueError(f"count={count} invalid for dimension {dim}")
        order = np.argsort(diag, kind="stable")[:count]
        vecs = np.zeros((dim, count))
        vecs[order, np.arange(count)] = 1.0
        return SpectralResult(
            eigenvalues=diag[order].astype(float),
            eigenvectors=vecs,
            residual_norms=np.zeros(count),
            method="diagonal",
            diagnostics={"dimension": dim},
        )
    if not 0 < count < dim or method == "dense" or (
        method == "auto" and dim <= dense_cutoff
    ):
        if not 0 < count <= dim:
            raise ValueError(f"count={count} invalid for dimension {dim}")
        vals, vecs = scipy.linalg.eigh(
            mat.toarray(), subset_by_index=(0, count - 1)
        )
        used = "dense"
        diagnostics = {"dimension": dim}
    elif method in ("auto", "lanczos"):
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        try:
            vals, vecs = eigsh(
                mat,
                k=count,
                which="SA",
                tol=tol * 1e-2,
                maxiter=maxiter,
                v0=v0,
            )
        except ArpackNoConvergence as exc:
            best_vals = np.asarray(exc.eigenvalues)
            best_res = (
                _residuals(mat, best_vals, exc.eigenvectors)
                if exc.eigenvectors is not None and len(best_vals)
                else None
            )
            raise EigensolverError(
                f"Lanczos did not converge within the iteration budget "
                f"({len(best_vals)} of {count} pairs converged)",
                best_eigenvalues=best_vals,
                best_residuals=best_res,
            ) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        used = "lanczos"
        diagnostics = {"dimension": dim, "start_vector": "uniform"}
    else:
        raise ValueError(f"unknown method {method!r}")

    vecs = _fix_signs(np.asarray(vecs))
    res = _residuals(mat, vals, vecs)
    if np.any(res > tol):
        raise EigensolverError(
            f"eigenpair residuals {res.max():.3e} exceed tolerance {tol:.1e}",
            best_eigenvalues=vals,
            best_residuals=res,
        )
    return SpectralResult(
        eigenvalues=np.asarray(vals, dtype=float),
        eigenvectors=vecs,
        residual_norms=res,
        method=used,
        diagnostics=diagnostics,
    )
