"""Multipartite state containers and the tensor operations built on them.

Conventions used throughout the package:

* subsystems are numbered from 1;
* amplitudes and matrix entries are stored row-major over the subsystem
  indices, last subsystem fastest (``|i_1 i_2 ... i_N>`` sits at position
  ``((i_1 d_2 + i_2) d_3 + ...)``);
* reduced matrices always act on the kept subsystems in ascending order.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError

MAX_TOTAL_DIM = 2**20

NORM_TOL = 1e-10
RENORMALIZE_TOL = 1e-6
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
REDUCED_PSD_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemShape:
    """Ordered local dimensions ``(d_1, ..., d_N)``."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValidationError("a system needs at least one subsystem", "INVALID_SHAPE")
        if any(d < 1 for d in dims):
            raise ValidationError(f"local dimensions must be positive, got {dims}", "INVALID_SHAPE")
        if prod(dims) > MAX_TOTAL_DIM:
            raise ValidationError(
                f"total dimension {prod(dims)} exceeds {MAX_TOTAL_DIM}", "INVALID_SHAPE")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return prod(self.dims)

    def dim_of(self, indices: Sequence[int]) -> int:
        return prod(self.dims[i - 1] for i in indices)

    def sub(self, indices: Sequence[int]) -> "SystemShape":
        return SystemShape(tuple(self.dims[i - 1] for i in indices))


@dataclass(frozen=True)
class SubsystemSet:
    """Distinct 1-based subsystem indices.

    ``order`` keeps the caller's ordering, which only matters for matrix
    unfoldings; ``ascending`` is the canonical layout of reduced matrices.
    """

    order: tuple[int, ...]

    @classmethod
    def of(cls, indices: Sequence[int], n: int) -> "SubsystemSet":
        idx = tuple(int(i) for i in indices)
        if not 1 <= len(idx) <= n:
            raise ValidationError(
                f"subset {idx} must contain between 1 and {n} indices", "INVALID_SUBSET")
        if len(set(idx)) != len(idx):
            raise ValidationError(f"subset {idx} repeats an index", "INVALID_SUBSET")
        bad = [i for i in idx if not 1 <= i <= n]
        if bad:
            raise ValidationError(
                f"subset {idx} has indices {bad} outside 1..{n}", "INVALID_SUBSET")
        return cls(idx)

    @property
    def ascending(self) -> tuple[int, ...]:
        return tuple(sorted(self.order))

    def __len__(self):
        return len(self.order)


@dataclass(frozen=True, eq=False)
class PureState:
    shape: SystemShape
    amplitudes: np.ndarray

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.shape.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    shape: SystemShape
    matrix: np.ndarray


State = Union[PureState, DensityMatrix]


def as_shape(shape) -> SystemShape:
    return shape if isinstance(shape, SystemShape) else SystemShape(tuple(shape))


def validate_pure(amplitudes, shape) -> PureState:
    """Check length and norm of an amplitude vector and wrap it.

    Vectors whose norm is off by at most ``RENORMALIZE_TOL`` are silently
    renormalized; anything further away is rejected.
    """
    shape = as_shape(shape)
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size != shape.total:
        raise ValidationError(
            f"expected {shape.total} amplitudes for dims {shape.dims}, got {v.size}",
            "LENGTH_MISMATCH")
    if not np.all(np.isfinite(v)):
        raise ValidationError("amplitudes contain non-finite values", "NOT_NORMALIZABLE")
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or abs(norm - 1.0) > RENORMALIZE_TOL:
        raise ValidationError(f"state norm {norm!r} is not 1", "NOT_NORMALIZABLE")
    if abs(norm - 1.0) > 4 * np.finfo(float).eps:
        v = v / norm
    return PureState(shape, _frozen(v))


def validate_density(matrix, shape, psd_tol: float = PSD_TOL) -> DensityMatrix:
    """Check that ``matrix`` is a Hermitian, unit-trace, PSD matrix over ``shape``."""
    shape = as_shape(shape)
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (shape.total, shape.total):
        raise ValidationError(
            f"expected a {shape.total}x{shape.total} matrix for dims {shape.dims}, "
            f"got shape {m.shape}", "LENGTH_MISMATCH")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains non-finite values", "NOT_HERMITIAN")
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > HERMITIAN_TOL:
        raise ValidationError(f"matrix is not Hermitian (max deviation {herm:.3g})",
                              "NOT_HERMITIAN")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"trace {tr.real:.12g} is not 1", "NOT_UNIT_TRACE")
    low = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if low < -psd_tol:
        raise ValidationError(f"matrix is not positive semidefinite (min eigenvalue {low:.3g})",
                              "NOT_PSD")
    return DensityMatrix(shape, _frozen(m))


def density_from_pure(psi: PureState) -> DensityMatrix:
    v = psi.amplitudes
    return DensityMatrix(psi.shape, _frozen(np.outer(v, v.conj())))


def partial_trace(state: State, keep) -> DensityMatrix:
    """Reduced density matrix on the subsystems in ``keep``.

    ``keep`` may be a :class:`SubsystemSet` or any sequence of indices; the
    result always acts on the kept subsystems in ascending order. Pure states
    are reduced directly from their amplitude tensor.
    """
    shape = state.shape
    if not isinstance(keep, SubsystemSet):
        keep = SubsystemSet.of(keep, shape.n)
    else:
        SubsystemSet.of(keep.order, shape.n)
    kept = [i - 1 for i in keep.ascending]
    dropped = [i for i in range(shape.n) if i not in kept]
    dk = shape.dim_of(keep.ascending)

    if isinstance(state, PureState):
        t = state.tensor().transpose(kept + dropped).reshape(dk, -1)
        out = t @ t.conj().T
    else:
        n = shape.n
        t = state.matrix.reshape(shape.dims + shape.dims)
        row = list(range(n))
        col = [n + i if i in kept else i for i in range(n)]
        out_axes = kept + [n + i for i in kept]
        out = np.einsum(t, row + col, out_axes).reshape(dk, dk)
    out = (out + out.conj().T) / 2
    return DensityMatrix(shape.sub(keep.ascending), _frozen(out))


def to_density(state: State) -> DensityMatrix:
    return density_from_pure(state) if isinstance(state, PureState) else state


def _cyclic_axes(k: int, x: int) -> list[int]:
    return [(x - 1 + s) % k for s in range(k)]


def unfold(v, dims: Sequence[int], x: int) -> np.ndarray:
    """Matrix unfolding of a k-partite vector at position ``x`` (1-based).

    Rows run over subsystem ``x``; columns over the remaining subsystems in
    the cyclic order ``x+1, ..., k, 1, ..., x-1``, last one fastest.
    """
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    if not 1 <= x <= k:
        raise ValidationError(f"unfolding position {x} outside 1..{k}", "BAD_POSITION")
    v = np.asarray(v)
    if v.size != prod(dims):
        raise ValidationError(
            f"vector of length {v.size} does not match dims {dims}", "LENGTH_MISMATCH")
    return v.reshape(dims).transpose(_cyclic_axes(k, x)).reshape(dims[x - 1], -1)


def fold(a: np.ndarray, dims: Sequence[int], x: int) -> np.ndarray:
    """Inverse of :func:`unfold`: recover the flat vector."""
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    if not 1 <= x <= k:
        raise ValidationError(f"unfolding position {x} outside 1..{k}", "BAD_POSITION")
    axes = _cyclic_axes(k, x)
    t = np.asarray(a).reshape([dims[i] for i in axes])
    return t.transpose(np.argsort(axes)).reshape(-1)


def apply_local(psi: PureState, unitaries: Sequence[np.ndarray]) -> PureState:
    """Apply ``U_1 x ... x U_N`` to a pure state, one tensor leg at a time."""
    if len(unitaries) != psi.shape.n:
        raise ValidationError(
            f"need {psi.shape.n} local operators, got {len(unitaries)}", "LENGTH_MISMATCH")
    t = psi.tensor()
    for axis, u in enumerate(unitaries):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)
    return PureState(psi.shape, _frozen(t.reshape(-1)))
