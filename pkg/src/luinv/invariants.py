"""Omega matrices and their characteristic-polynomial invariants.

For a reduced state ``rho_I = sum_m |X~_m><X~_m|`` the Omega matrix has
entries ``Omega_lm = Tr(A_l A_m^T)`` where ``A_m`` is a matrix unfolding of
``|X~_m>``. Two coefficient vectors are extracted per (subset, position):

``literal``
    characteristic polynomial of ``Omega`` itself, under the canonical
    eigenvector phase convention;
``robust``
    characteristic polynomial of ``Omega @ conj(Omega)``, which is unchanged
    by eigenvector phases and by any basis change inside degenerate
    eigenspaces (``Omega -> V Omega V^T``).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from . import numerics
from .errors import ValidationError
from .multilinear import State, SubsystemSet, partial_trace
from .numerics import WeightedEigensystem, char_poly_coefficients


@dataclass(frozen=True, eq=False)
class OmegaMatrix:
    entries: np.ndarray
    subset: SubsystemSet
    position: int
    degenerate: bool
    complex_source: bool


@dataclass(frozen=True, eq=False)
class InvariantSet:
    subset: tuple[int, ...]
    position: int
    literal: Optional[np.ndarray]
    robust: np.ndarray
    degenerate: bool
    complex_source: bool
    rank: int

    @property
    def convention_dependent(self) -> bool:
        """Literal coefficients may depend on the chosen degenerate basis."""
        return self.degenerate and self.complex_source


@dataclass(frozen=True, eq=False)
class Fingerprint:
    dims: tuple[int, ...]
    one_body_spectra: tuple[np.ndarray, ...]
    invariant_sets: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def keys(self):
        return sorted(self.invariant_sets)


def conventions(all_positions: bool = False, robust_only: bool = False) -> dict:
    return {
        "index_order": "row-major, last subsystem fastest",
        "coefficient_order": "ascending powers, c_D = 1",
        "omega_dimension": "full reduced dimension",
        "rank_cutoff": numerics.RANK_CUTOFF,
        "degeneracy_rtol": numerics.DEGENERACY_RTOL,
        "phase_convention": "largest-modulus entry real positive, ties to lowest index",
        "robust_variant": "charpoly(Omega conj(Omega))",
        "positions": "all" if all_positions else "first",
        "robust_only": bool(robust_only),
    }


def reduced_eigensystem(state: State, subset: SubsystemSet) -> WeightedEigensystem:
    """partial trace -> eigendecomposition -> canonical phases."""
    rho = partial_trace(state, subset)
    return numerics.canonical_phase_fix(numerics.hermitian_eigendecomposition(rho))


def omega_matrix(sys: WeightedEigensystem, subset: SubsystemSet, x: int,
                 dims: Sequence[int]) -> OmegaMatrix:
    """Build ``Omega_lk = Tr(A_l A_k^T)`` from unfoldings at position ``x``.

    ``dims`` are the local dimensions of ``subset`` in ascending index order,
    i.e. the layout of the reduced matrix ``sys`` was computed from.
    """
    k = len(subset)
    if not 1 <= x <= k:
        raise ValidationError(f"unfolding position {x} outside 1..{k}", "BAD_POSITION")
    asc = subset.ascending
    dims = tuple(dims)
    if len(dims) != k:
        raise ValidationError(f"dims {dims} do not match subset {subset.order}", "LENGTH_MISMATCH")
    # Vectors are stored over ascending indices; reorder legs to the caller's
    # subset order, then cycle so position x leads.
    perm = [asc.index(i) for i in subset.order]
    cyc = [perm[(x - 1 + s) % k] for s in range(k)]
    d = sys.dim
    t = sys.weighted.T.reshape((d,) + dims)
    t = t.transpose([0] + [1 + a for a in cyc])
    a = t.reshape(d, dims[cyc[0]], -1)

    flat = a.reshape(d, -1)
    gram = flat @ flat.T
    upper = np.triu(gram)
    entries = upper + np.triu(gram, 1).T
    return OmegaMatrix(entries=entries, subset=subset, position=x,
                       degenerate=sys.degenerate, complex_source=not sys.is_real_path)


def robust_invariants(omega) -> np.ndarray:
    """Characteristic polynomial of ``Omega @ conj(Omega)`` (ascending)."""
    m = np.asarray(getattr(omega, "entries", omega))
    return char_poly_coefficients(m @ m.conj())


def _invariant_set(sys, subset, x, dims, robust_only=False) -> InvariantSet:
    om = omega_matrix(sys, subset, x, dims)
    return InvariantSet(
        subset=subset.order,
        position=x,
        literal=None if robust_only else char_poly_coefficients(om.entries),
        robust=robust_invariants(om),
        degenerate=om.degenerate,
        complex_source=om.complex_source,
        rank=sys.rank,
    )


def kbody_invariants(state: State, subset, x: int = 1, robust_only: bool = False) -> InvariantSet:
    """Invariants of the reduced state on ``subset`` unfolded at position ``x``."""
    if not isinstance(subset, SubsystemSet):
        subset = SubsystemSet.of(subset, state.shape.n)
    if len(subset) < 2:
        raise ValidationError("k-body invariants need at least two subsystems", "INVALID_SUBSET")
    sys = reduced_eigensystem(state, subset)
    return _invariant_set(sys, subset, x, state.shape.sub(subset.ascending).dims, robust_only)


def bipartite_invariants(state: State, i: int, j: int) -> InvariantSet:
    if i == j:
        raise ValidationError(f"pair ({i}, {j}) needs two distinct subsystems", "INVALID_SUBSET")
    return kbody_invariants(state, (i, j), 1)


def one_body_spectra(state: State) -> tuple[np.ndarray, ...]:
    """Descending eigenvalues of every single-subsystem reduction."""
    out = []
    for i in range(1, state.shape.n + 1):
        rho = partial_trace(state, (i,))
        w = np.linalg.eigvalsh(rho.matrix)[::-1]
        out.append(np.clip(w, 0.0, None))
    return tuple(out)


def _subset_list(n, max_subset_size, subsets):
    if subsets is not None:
        return sorted({tuple(sorted(SubsystemSet.of(s, n).order)) for s in subsets})
    if not 1 <= max_subset_size <= n:
        raise ValidationError(f"max subset size {max_subset_size} outside 1..{n}",
                              "INVALID_SUBSET")
    return [c for k in range(2, max_subset_size + 1) for c in combinations(range(1, n + 1), k)]


def full_fingerprint(state: State, max_subset_size: int = 2, all_positions: bool = False,
                     subsets: Optional[Iterable[Sequence[int]]] = None,
                     robust_only: bool = False, workers: Optional[int] = None) -> Fingerprint:
    """One-body spectra plus invariant sets for every requested subset.

    ``subsets`` overrides ``max_subset_size``. With ``all_positions`` every
    unfolding position of every subset is included, otherwise position 1.
    Subsets are stored in ascending index order. ``workers > 1`` evaluates
    subsets in a thread pool; the result does not depend on it.
    """
    shape = state.shape
    subs = _subset_list(shape.n, max_subset_size, subsets)
    for s in subs:
        if len(s) < 2:
            raise ValidationError(f"subset {s} needs at least two subsystems", "INVALID_SUBSET")

    def work(s):
        subset = SubsystemSet(s)
        sys = reduced_eigensystem(state, subset)
        dims = shape.sub(s).dims
        positions = range(1, len(s) + 1) if all_positions else (1,)
        return [((s, x), _invariant_set(sys, subset, x, dims, robust_only)) for x in positions]

    if workers and workers > 1 and len(subs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, subs))
    else:
        results = [work(s) for s in subs]
    sets = dict(item for chunk in results for item in chunk)
    return Fingerprint(
        dims=shape.dims,
        one_body_spectra=one_body_spectra(state),
        invariant_sets={k: sets[k] for k in sorted(sets)},
        metadata=conventions(all_positions, robust_only),
    )
