"""Expectation values of number, momentum, and energy observables on states.

All observables here are diagonal on the occupation basis except the
gradient formula, which combines the total momentum with the diagonal field
momentum.  Functions are pure and safe for concurrent use.
"""

import warnings

import numpy as np

from cerenkov_fiber.fock import FockBasis

NORM_SLACK = 1e-10


def _normalized(state: np.ndarray, what: str) -> np.ndarray:
    state = np.asarray(state, dtype=float)
    norm = np.linalg.norm(state)
    if norm == 0.0:
        raise ValueError(f"{what}: zero state")
    if abs(norm - 1.0) > NORM_SLACK:
        warnings.warn(
            f"{what}: state norm {norm:.6g} != 1, normalizing internally",
            stacklevel=3,
        )
        return state / norm
    return state


def expect_number(state, weight, basis: FockBasis) -> float:
    """<dGamma(w)> for a per-mode weight array (or callable on wavevectors)."""
    if callable(weight):
        weight = weight(basis.grid.k)
    psi = _normalized(state, "expect_number")
    diag = basis.dgamma_diagonal(np.asarray(weight, dtype=float))
    return float(np.sum(psi * psi * diag))


def expect_field_momentum(state, basis: FockBasis) -> np.ndarray:
    psi = _normalized(state, "expect_field_momentum")
    return (psi * psi) @ basis.total_momentum


def expect_field_energy(state, basis: FockBasis) -> float:
    psi = _normalized(state, "expect_field_energy")
    return float(np.sum(psi * psi * basis.free_field_energy))


def expect_field_momentum_sq(state, basis: FockBasis) -> float:
    """<(P^f)^2>: diagonal, the squared vector sum per basis state."""
    psi = _normalized(state, "expect_field_momentum_sq")
    sq = np.einsum("sd,sd->s", basis.total_momentum, basis.total_momentum)
    return float(np.sum(psi * psi * sq))


def feynman_hellmann_grad(
    state,
    P,
    basis: FockBasis,
    residual_norm: float | None = None,
    residual_tol: float = 1e-6,
) -> np.ndarray:
    """Gradient of the eigenvalue with respect to P: P - <P^f>.

    Valid on converged eigenvectors; warns when the supplied eigen-residual
    exceeds `residual_tol`.
    """
    if residual_norm is not None and residual_norm > residual_tol:
        warnings.warn(
            f"eigen-residual {residual_norm:.3e} above {residual_tol:.1e}; "
            "gradient may be unreliable",
            stacklevel=2,
        )
    P = np.asarray(P, dtype=float).reshape(3)
    return P - expect_field_momentum(state, basis)
