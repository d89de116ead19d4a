"""Truncated bosonic occupation-number basis and ladder-operator matrix elements.

States are multisets of grid-mode indices, stored as nondecreasing tuples.
The canonical order is graded by total boson number, then lexicographic in
the nondecreasing mode-index word; this tie-breaking is frozen so result
files reproduce bit-for-bit.  The vacuum is always ordinal 0.

Basis objects are immutable after construction and safe for shared reads.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from cerenkov_fiber.grids import MomentumGrid

DEFAULT_DIM_BUDGET = 400_000


class BasisSizeError(RuntimeError):
    """Basis dimension exceeds the configured budget."""

    def __init__(self, dimension: int, budget: int):
        super().__init__(
            f"basis dimension {dimension} exceeds the configured budget {budget}"
        )
        self.dimension = dimension
        self.budget = budget


class StateLookupError(KeyError):
    """Occupation is not an admissible basis state."""


def untruncated_dimension(n_modes: int, n_max: int) -> int:
    """Stars-and-bars count: sum_n C(M + n - 1, n) for n = 0..n_max."""
    return sum(math.comb(n_modes + n - 1, n) for n in range(n_max + 1))


def _canonical_tuple(occupation, n_modes: int) -> tuple:
    """Normalize an occupation to the sorted mode-index word.

    Accepts a dict {mode: count} or an iterable of mode indices with
    repetition (e.g. (3, 3, 7) for two bosons at mode 3 and one at mode 7).
    """
    if isinstance(occupation, dict):
        word = []
        for mode, count in sorted(occupation.items()):
            if count < 0:
                raise StateLookupError(f"negative count for mode {mode}")
            word.extend([int(mode)] * int(count))
    else:
        word = sorted(int(m) for m in occupation)
    if any(not 0 <= m < n_modes for m in word):
        raise StateLookupError(f"occupation {occupation!r} has out-of-range modes")
    return tuple(word)


@dataclass
class FockBasis:
    """Enumerated occupation basis with fast index maps and per-state totals."""

    grid: MomentumGrid
    n_max: int
    e_cut: float | None
    states: list
    _index: dict = field(repr=False)

    def __post_init__(self):
        mags = self.grid.magnitudes
        entry_state, entry_mode, entry_count = [], [], []
        for i, word in enumerate(self.states):
            for mode, group in itertools.groupby(word):
                entry_state.append(i)
                entry_mode.append(mode)
                entry_count.append(sum(1 for _ in group))
        self._entry_state = np.asarray(entry_state, dtype=np.int64)
        self._entry_mode = np.asarray(entry_mode, dtype=np.int64)
        self._entry_count = np.asarray(entry_count, dtype=np.float64)
        dim = len(self.states)
        self.boson_count = np.bincount(
            self._entry_state, weights=self._entry_count, minlength=dim
        )
        self.free_field_energy = self.dgamma_diagonal(mags)
        self.total_momentum = self.dgamma_vector_diagonal(self.grid.k)
        self._transitions = None

    @property
    def dimension(self) -> int:
        return len(self.states)

    def index_of(self, occupation) -> int:
        word = _canonical_tuple(occupation, self.grid.n_modes)
        try:
            return self._index[word]
        except KeyError:
            raise StateLookupError(
                f"occupation {occupation!r} is not in the truncated basis"
            ) from None

    def state_at(self, ordinal: int) -> tuple:
        """Nondecreasing mode-index word of basis state `ordinal`."""
        return self.states[ordinal]

    def occupation_of(self, ordinal: int) -> dict:
        occ = {}
        for mode in self.states[ordinal]:
            occ[mode] = occ.get(mode, 0) + 1
        return occ

    def one_boson_index(self, mode: int) -> int | None:
        return self._index.get((mode,))

    def one_boson_ordinals(self) -> np.ndarray:
        """Ordinal of each mode's one-boson state; -1 where truncated away."""
        if getattr(self, "_one_boson", None) is None:
            out = np.full(self.grid.n_modes, -1, dtype=np.int64)
            for mode in range(self.grid.n_modes):
                ordinal = self._index.get((mode,))
                if ordinal is not None:
                    out[mode] = ordinal
            self._one_boson = out
        return self._one_boson

    def vacuum_vector(self) -> np.ndarray:
        vec = np.zeros(self.dimension)
        vec[0] = 1.0
        return vec

    def dgamma_diagonal(self, mode_weights) -> np.ndarray:
        """Diagonal of dGamma(w): per state, sum of count * w(mode)."""
        w = np.asarray(mode_weights, dtype=float)
        vals = self._entry_count * w[self._entry_mode]
        return np.bincount(self._entry_state, weights=vals, minlength=self.dimension)

    def dgamma_vector_diagonal(self, mode_vectors) -> np.ndarray:
        """Per-state vector sum of count * v(mode); shape (dim, 3)."""
        v = np.asarray(mode_vectors, dtype=float)
        out = np.empty((self.dimension, v.shape[1]))
        for d in range(v.shape[1]):
            out[:, d] = self.dgamma_diagonal(v[:, d])
        return out

    def transitions(self):
        """All single-boson-removal transitions (rows, cols, modes, amps).

        For each state j and occupied mode m with count c, the state i with
        one fewer boson at m satisfies  b†_m |i> = sqrt(c) |j>.  Reused for
        interaction assembly, per-mode ladder matrices, and smeared-operator
        expectations.
        """
        if self._transitions is None:
            rows, cols, modes, amps = [], [], [], []
            for j, word in enumerate(self.states):
                if not word:
                    continue
                for pos, mode in enumerate(word):
                    if pos > 0 and word[pos - 1] == mode:
                        continue  # one transition per distinct mode
                    reduced = word[:pos] + word[pos + 1 :]
                    i = self._index[reduced]
                    count = word.count(mode)
                    rows.append(j)
                    cols.append(i)
                    modes.append(mode)
                    amps.append(math.sqrt(count))
            self._transitions = (
                np.asarray(rows, dtype=np.int64),
                np.asarray(cols, dtype=np.int64),
                np.asarray(modes, dtype=np.int64),
                np.asarray(amps, dtype=np.float64),
            )
        return self._transitions


def _enumerate_with_energy_cut(mode_energy, n_max, e_cut, budget):
    """Nondecreasing mode words with total energy <= e_cut, graded order."""
    suffix_min = np.minimum.accumulate(mode_energy[::-1])[::-1]
    states = [()]
    # graded: generate per boson count so the order matches the no-cut path
    for n in range(1, n_max + 1):
        count_before = len(states)
        for word in _graded_energy_level(mode_energy, suffix_min, n, e_cut):
            states.append(word)
            if len(states) > budget:
                raise BasisSizeError(len(states), budget)
        if len(states) == count_before and n > 1:
            break  # higher levels only add energy
    return states


def _graded_energy_level(mode_energy, suffix_min, n, e_cut):
    n_modes = len(mode_energy)
    tol = 1e-12 * max(1.0, abs(e_cut))

    def rec(start, depth, energy, word):
        if depth == n:
            yield word
            return
        remaining = n - depth
        for mode in range(start, n_modes):
            e = energy + mode_energy[mode]
            if e + (remaining - 1) * suffix_min[mode] > e_cut + tol:
                continue
            yield from rec(mode, depth + 1, e, word + (mode,))

    yield from rec(0, 0, 0.0, ())


def build_basis(
    grid: MomentumGrid,
    n_max: int,
    e_cut: float | None = None,
    max_dim: int = DEFAULT_DIM_BUDGET,
) -> FockBasis:
    """Enumerate all admissible occupations in the frozen canonical order."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    n_modes = grid.n_modes
    if e_cut is None:
        dim = untruncated_dimension(n_modes, n_max)
        if dim > max_dim:
            raise BasisSizeError(dim, max_dim)
        states = []
        for n in range(n_max + 1):
            states.extend(itertools.combinations_with_replacement(range(n_modes), n))
    else:
        states = _enumerate_with_energy_cut(
            grid.magnitudes, n_max, float(e_cut), max_dim
        )
    index = {word: i for i, word in enumerate(states)}
    return FockBasis(grid=grid, n_max=n_max, e_cut=e_cut, states=states, _index=index)


def ladder_matrix(basis: FockBasis, mode: int) -> sparse.csr_matrix:
    """Creation matrix b†_mode on the truncated basis (real, sparse).

    Amplitude sqrt(n_mode + 1) toward the one-more-boson state; images outside
    the truncation are dropped.  Annihilation is the transpose.
    """
    if not 0 <= mode < basis.grid.n_modes:
        raise ValueError(f"mode {mode} out of range")
    rows, cols, modes, amps = basis.transitions()
    mask = modes == mode
    dim = basis.dimension
    return sparse.csr_matrix(
        (amps[mask], (rows[mask], cols[mask])), shape=(dim, dim)
    )


class LadderMatrices:
    """Lazy per-mode cache of creation matrices on a fixed basis."""

    def __init__(self, basis: FockBasis):
        self.basis = basis
        self._cache = {}

    def creation(self, mode: int) -> sparse.csr_matrix:
        if mode not in self._cache:
            self._cache[mode] = ladder_matrix(self.basis, mode)
        return self._cache[mode]

    def annihilation(self, mode: int) -> sparse.csr_matrix:
        return self.creation(mode).T.tocsr()
