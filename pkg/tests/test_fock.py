import math

import numpy as np
import pytest

from cerenkov_fiber.fock import (
    BasisSizeError,
    LadderMatrices,
    StateLookupError,
    build_basis,
    ladder_matrix,
    untruncated_dimension,
)
from cerenkov_fiber.grids import AngularSpec, RadialSpec, build_grid


def two_mode_grid():
    grid = build_grid(RadialSpec(0.4, 1.0, 2, "linear"), AngularSpec(1, 1))
    return grid


def test_dimension_matches_stars_and_bars():
    grid = two_mode_grid()
    basis = build_basis(grid, 2)
    assert basis.dimension == 6  # 1 + 2 + 3
    assert basis.dimension == untruncated_dimension(2, 2)


@pytest.mark.parametrize(
    "m,n_max",
    [(2, 2), (3, 1), (3, 3), (4, 2), (6, 3)],
)
def test_dimension_formula_various(m, n_max):
    grid = build_grid(RadialSpec(0.2, 1.0, m, "linear"), AngularSpec(1, 1))
    basis = build_basis(grid, n_max)
    assert basis.dimension == sum(
        math.comb(m + n - 1, n) for n in range(n_max + 1)
    )


def test_vacuum_only_basis():
    grid = two_mode_grid()
    basis = build_basis(grid, 0)
    assert basis.dimension == 1
    assert basis.states[0] == ()


def test_three_modes_single_boson():
    grid = build_grid(RadialSpec(0.2, 1.0, 3, "linear"), AngularSpec(1, 1))
    basis = build_basis(grid, 1)
    assert basis.dimension == 4


def test_canonical_order_graded_then_lexicographic():
    grid = two_mode_grid()
    basis = build_basis(grid, 2)
    assert basis.states == [(), (0,), (1,), (0, 0), (0, 1), (1, 1)]


def test_index_roundtrip_all_states(small_basis):
    for i in range(small_basis.dimension):
        assert small_basis.index_of(small_basis.state_at(i)) == i
        assert small_basis.index_of(small_basis.occupation_of(i)) == i
    assert small_basis.index_of(()) == 0  # vacuum first


def test_index_lookup_failures(small_basis):
    n_max = small_basis.n_max
    with pytest.raises(StateLookupError):
        small_basis.index_of((0,) * (n_max + 1))  # violates N_max
    with pytest.raises(StateLookupError):
        small_basis.index_of((small_basis.grid.n_modes,))  # bad mode
    with pytest.raises(StateLookupError):
        small_basis.index_of({0: -1})


def test_energy_cut_prunes_and_orders():
    grid = build_grid(RadialSpec(0.2, 1.0, 4, "linear"), AngularSpec(1, 1))
    cut = 0.9
    basis = build_basis(grid, 3, e_cut=cut)
    full = build_basis(grid, 3)
    expected = [
        w for w in full.states if sum(grid.magnitudes[m] for m in w) <= cut + 1e-12
    ]
    assert basis.states == expected
    assert basis.dimension < full.dimension


def test_basis_budget_failure_reports_dimension():
    grid = build_grid(RadialSpec(0.1, 1.0, 30, "linear"), AngularSpec(1, 1))
    with pytest.raises(BasisSizeError) as err:
        build_basis(grid, 3, max_dim=100)
    assert err.value.dimension > 100
    assert str(err.value.dimension) in str(err.value)


def test_creation_on_vacuum(small_basis):
    bd = ladder_matrix(small_basis, 3)
    column = bd.toarray()[:, 0]
    target = small_basis.index_of((3,))
    assert column[target] == pytest.approx(1.0)
    assert np.count_nonzero(column) == 1


def test_annihilation_after_creation_counts(small_basis):
    # b b+ on a state with two bosons in the mode gives n+1 = 3 while the
    # three-boson image exists; here N_max = 2 truncates it away, so test
    # b+ b (always safe) and b b+ on the one-boson state instead.
    bd = ladder_matrix(small_basis, 1)
    number = (bd.T @ bd).diagonal()
    one = small_basis.index_of((1,))
    two = small_basis.index_of((1, 1))
    # b b+ = n+1 on states whose image survives truncation
    assert number[0] == pytest.approx(1.0)
    assert number[one] == pytest.approx(2.0)
    # truncated sector: the image of (1,1) leaves the basis, entry drops to 0
    assert number[two] == pytest.approx(0.0)
    # b+ b = n everywhere
    assert (bd @ bd.T).diagonal()[two] == pytest.approx(2.0)


def test_untruncated_sector_bbdag_eigenvalue():
    grid = two_mode_grid()
    basis = build_basis(grid, 3)
    bd = ladder_matrix(basis, 0)
    idx = basis.index_of((0, 0))  # n_0 = 2, image has 3 <= N_max
    assert (bd.T @ bd).diagonal()[idx] == pytest.approx(3.0)


def test_ccr_on_safe_sector(small_basis):
    dim = small_basis.dimension
    for mode in (0, 5):
        bd = ladder_matrix(small_basis, mode)
        comm = (bd.T @ bd - bd @ bd.T).toarray()
        safe = small_basis.boson_count < small_basis.n_max
        for i in np.nonzero(safe)[0]:
            row = np.zeros(dim)
            row[i] = 1.0
            assert comm[:, i] == pytest.approx(row)


def test_number_operator_from_ladders(small_basis):
    total = None
    for mode in range(small_basis.grid.n_modes):
        bd = ladder_matrix(small_basis, mode)
        term = bd @ bd.T  # b+ b = dGamma(1_m), exact even under truncation
        total = term if total is None else total + term
    dense = total.toarray()
    assert np.allclose(dense, np.diag(small_basis.boson_count), atol=1e-14)


def test_dgamma_diagonal_matches_direct_sum(small_basis):
    rng = np.random.default_rng(7)
    w = rng.uniform(0.0, 2.0, small_basis.grid.n_modes)
    diag = small_basis.dgamma_diagonal(w)
    for i in (0, 1, small_basis.dimension - 1):
        occ = small_basis.occupation_of(i)
        assert diag[i] == pytest.approx(sum(c * w[m] for m, c in occ.items()))


def test_ladder_matrices_cache(small_basis):
    ladders = LadderMatrices(small_basis)
    a = ladders.creation(2)
    b = ladders.creation(2)
    assert a is b
    assert (ladders.annihilation(2) != a.T).nnz == 0


def test_one_boson_ordinals(small_basis):
    ords = small_basis.one_boson_ordinals()
    for mode in range(small_basis.grid.n_modes):
        assert ords[mode] == small_basis.index_of((mode,))
