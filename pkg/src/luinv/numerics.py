"""Numerical kernels: spectral decomposition, characteristic polynomials, Haar sampling."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericsError, ValidationError

RANK_CUTOFF = 1e-12
DEGENERACY_RTOL = 1e-8
HERMITIAN_INPUT_TOL = 1e-8
REAL_PATH_TOL = 1e-12
PHASE_TIE_TOL = 1e-12
MAX_CHARPOLY_DIM = 4096


@dataclass(frozen=True, eq=False)
class WeightedEigensystem:
    """Spectral decomposition ``H = sum_m |X~_m><X~_m|`` with ``X~_m = sqrt(L_m) X_m``.

    Attributes
    ----------
    eigenvalues : (D,) float array
        Sorted descending, clamped at zero.
    vectors : (D, D) array
        Orthonormal eigenvectors as columns, same order as ``eigenvalues``.
    weighted : (D, D) array
        Columns ``sqrt(L_m) X_m``; columns of eigenvalues below the rank cutoff
        are exactly zero.
    groups : tuple of tuples
        Partition of column indices into runs of equal eigenvalues.
    rank : int
        Number of eigenvalues above ``cutoff * max eigenvalue``.
    is_real_path : bool
        True when the input was real and a real-symmetric solver was used.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    weighted: np.ndarray
    groups: tuple
    rank: int
    is_real_path: bool

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def degenerate(self) -> bool:
        """True when some group of *nonzero* eigenvalues has size >= 2."""
        return any(len(g) > 1 and g[0] < self.rank for g in self.groups)


def _weighted(eigenvalues, vectors, rank):
    w = np.sqrt(eigenvalues)
    w[rank:] = 0.0
    return vectors * w


def _groups(eigenvalues, rtol):
    scale = max(float(eigenvalues[0]), np.finfo(float).tiny) if eigenvalues.size else 1.0
    groups, current = [], [0]
    for m in range(1, eigenvalues.size):
        if eigenvalues[m - 1] - eigenvalues[m] <= rtol * scale:
            current.append(m)
        else:
            groups.append(tuple(current))
            current = [m]
    if eigenvalues.size:
        groups.append(tuple(current))
    return tuple(groups)


def hermitian_eigendecomposition(h, cutoff: float = RANK_CUTOFF) -> WeightedEigensystem:
    """Full spectral decomposition of a Hermitian matrix.

    Real inputs (imaginary parts below ``REAL_PATH_TOL``) go through a real
    symmetric solver, so their eigenvectors are real.
    """
    h = np.asarray(getattr(h, "matrix", h), dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {h.shape}", "NOT_HERMITIAN")
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if dev > HERMITIAN_INPUT_TOL:
        raise ValidationError(f"matrix is not Hermitian (max deviation {dev:.3g})",
                              "NOT_HERMITIAN")
    real_path = bool(np.max(np.abs(h.imag), initial=0.0) <= REAL_PATH_TOL)
    try:
        if real_path:
            a = h.real
            w, v = np.linalg.eigh((a + a.T) / 2)
        else:
            w, v = np.linalg.eigh((h + h.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(str(exc), "EIGENSOLVER_FAILURE") from exc

    order = np.argsort(-w, kind="stable")
    w = np.clip(w[order], 0.0, None)
    v = v[:, order].astype(complex)
    top = float(w[0]) if w.size else 0.0
    rank = int(np.count_nonzero(w > cutoff * top)) if top > 0 else 0
    return WeightedEigensystem(
        eigenvalues=w,
        vectors=v,
        weighted=_weighted(w, v, rank),
        groups=_groups(w, DEGENERACY_RTOL),
        rank=rank,
        is_real_path=real_path,
    )


def canonical_phase_fix(sys: WeightedEigensystem) -> WeightedEigensystem:
    """Rotate each eigenvector so its largest-modulus entry is real and positive.

    Ties in modulus (within ``PHASE_TIE_TOL``) go to the lowest index.
    """
    vectors = sys.vectors.copy()
    for m in range(sys.rank):
        col = vectors[:, m]
        mod = np.abs(sys.weighted[:, m])
        pivot = int(np.flatnonzero(mod >= mod.max() - PHASE_TIE_TOL)[0])
        vectors[:, m] = col * (abs(col[pivot]) / col[pivot])
    if sys.is_real_path:
        vectors = vectors.real.astype(complex)
    return replace(sys, vectors=vectors, weighted=_weighted(sys.eigenvalues, vectors, sys.rank))


def rotate_within_groups(sys: WeightedEigensystem, seed=None, real=False) -> WeightedEigensystem:
    """Re-choose the basis of every degenerate eigenspace at random.

    Only groups of nonzero eigenvalues are rotated. With ``real=True`` the
    rotations are orthogonal, keeping real-path eigenvectors real.
    """
    rng = np.random.default_rng(seed)
    vectors = sys.vectors.copy()
    for g in sys.groups:
        if len(g) < 2 or g[0] >= sys.rank:
            continue
        idx = list(g)
        v = haar_random_orthogonal(len(g), rng) if real else haar_random_unitary(len(g), rng)
        vectors[:, idx] = vectors[:, idx] @ v
    return replace(sys, vectors=vectors, weighted=_weighted(sys.eigenvalues, vectors, sys.rank))


def char_poly_coefficients(m) -> np.ndarray:
    """Coefficients of ``det(lambda I - M)`` in ascending powers (Faddeev-LeVerrier).

    Returns a complex array ``c`` of length ``D + 1`` with ``c[D] == 1``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}", "NOT_SQUARE")
    d = m.shape[0]
    if d > MAX_CHARPOLY_DIM:
        raise ValidationError(f"matrix side {d} exceeds {MAX_CHARPOLY_DIM}",
                              "DIMENSION_TOO_LARGE")
    c = np.zeros(d + 1, dtype=complex)
    c[d] = 1.0
    aux = np.zeros_like(m)
    eye = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        aux = m @ (aux + c[d - k + 1] * eye)
        c[d - k] = -np.trace(aux) / k
    return c


def haar_random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary (QR of a Ginibre matrix with phase correction).

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if d < 1:
        raise ValidationError(f"dimension must be positive, got {d}", "INVALID_SHAPE")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_random_orthogonal(d: int, seed=None) -> np.ndarray:
    """Haar-distributed real orthogonal matrix."""
    if d < 1:
        raise ValidationError(f"dimension must be positive, got {d}", "INVALID_SHAPE")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diagonal(r))
