"""Named example states and seeded random states."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import ValidationError
from .multilinear import (DensityMatrix, PureState, SystemShape, apply_local, as_shape,
                          partial_trace, validate_density, validate_pure)
from .numerics import RANK_CUTOFF, haar_random_orthogonal, haar_random_unitary

NONDEGENERATE_GAP = 1e-6
MAX_RESEEDS = 10


def ghz(theta: float) -> PureState:
    """``cos(theta)|000> + sin(theta)|111>``."""
    v = np.zeros(8, dtype=complex)
    v[0], v[7] = np.cos(theta), np.sin(theta)
    return validate_pure(v, (2, 2, 2))


def w(alpha: float, beta: float, gamma: float) -> PureState:
    """``alpha|001> + beta|010> + gamma|100>`` with real weights."""
    norm2 = alpha**2 + beta**2 + gamma**2
    if abs(norm2 - 1.0) > 1e-10:
        raise ValidationError(f"alpha^2 + beta^2 + gamma^2 = {norm2!r}, expected 1",
                              "NOT_NORMALIZED")
    v = np.zeros(8, dtype=complex)
    v[1], v[2], v[4] = alpha, beta, gamma
    return validate_pure(v, (2, 2, 2))


def qutrit_psi() -> PureState:
    x = np.exp(-2j * np.pi / 3)
    v = np.array([1, 0, 0, 0, 1, 0, 0, 0, 1,
                  0, x, 0, 0, 0, x, x, 0, 0,
                  0, 0, x**2, x**2, 0, 0, 0, x**2, 0], dtype=complex) / 3
    return validate_pure(v, (3, 3, 3))


def _basis(a, b, c):
    return 9 * a + 3 * b + c


def _example4(support) -> np.ndarray:
    # exact rational assembly, converted to float once
    m = [[Fraction(0)] * 27 for _ in range(27)]
    for p in support:
        for q in support:
            m[p][q] += Fraction(1, 6)
    for a, weight in ((0, Fraction(1, 54)), (1, Fraction(1, 81)), (2, Fraction(2, 81))):
        for i in range(3):
            for j in range(3):
                k = _basis(a, i, j)
                m[k][k] += weight
    assert sum(m[k][k] for k in range(27)) == 1
    return np.array([[float(e) for e in row] for row in m], dtype=complex)


def example4_pair() -> tuple[DensityMatrix, DensityMatrix]:
    """The two three-qutrit mixed states with identical spectra.

    Both are ``1/2 |v><v|`` plus a diagonal mixture weighted by the first
    qutrit (1/54, 1/81, 2/81 on ``|0ij>``, ``|1ij>``, ``|2ij>``), with
    ``v = (|000> + |111> + |222>)/sqrt 3`` for rho and
    ``v = (|001> + |111> + |222>)/sqrt 3`` for sigma.
    """
    rho = _example4([_basis(0, 0, 0), _basis(1, 1, 1), _basis(2, 2, 2)])
    sigma = _example4([_basis(0, 0, 1), _basis(1, 1, 1), _basis(2, 2, 2)])
    return validate_density(rho, (3, 3, 3)), validate_density(sigma, (3, 3, 3))


def _min_gap(psi: PureState) -> float:
    """Smallest gap between nonzero eigenvalues over all two-body reductions."""
    gap = np.inf
    for pair in combinations(range(1, psi.shape.n + 1), 2):
        w = np.linalg.eigvalsh(partial_trace(psi, pair).matrix)[::-1]
        w = w[w > RANK_CUTOFF * w[0]]
        if w.size > 1:
            gap = min(gap, float(np.min(-np.diff(w))))
    return gap


def random_pure(shape, seed=None, real: bool = False,
                require_nondegenerate: bool = False) -> PureState:
    """Gaussian random pure state, deterministic per seed.

    With ``require_nondegenerate`` the state is redrawn (up to ``MAX_RESEEDS``
    times) until every two-body reduction has nonzero eigenvalues separated
    by at least ``NONDEGENERATE_GAP``.
    """
    shape = as_shape(shape)
    for attempt in range(MAX_RESEEDS):
        rng = np.random.default_rng(seed if attempt == 0 else [seed, attempt])
        v = rng.standard_normal(shape.total)
        if not real:
            v = v + 1j * rng.standard_normal(shape.total)
        psi = validate_pure(v / np.linalg.norm(v), shape)
        if not require_nondegenerate or shape.n < 2 or _min_gap(psi) >= NONDEGENERATE_GAP:
            return psi
    raise ValidationError(f"no non-degenerate sample after {MAX_RESEEDS} draws",
                          "DEGENERATE_SAMPLE")


def lu_orbit(psi: PureState, seed=None) -> PureState:
    """Apply independent Haar-random local unitaries to every subsystem.

    One-dimensional subsystems get the identity rather than a random phase.
    """
    rng = np.random.default_rng(seed)
    return apply_local(psi, [haar_random_unitary(d, rng) if d > 1 else np.eye(1)
                             for d in psi.shape.dims])


def lo_orbit(psi: PureState, seed=None) -> PureState:
    """Apply independent Haar-random local real orthogonal maps."""
    rng = np.random.default_rng(seed)
    return apply_local(psi, [haar_random_orthogonal(d, rng) for d in psi.shape.dims])


def _dims_param(value) -> tuple[int, ...]:
    if isinstance(value, str):
        return tuple(int(p) for p in value.replace("x", ",").split(",") if p.strip())
    return tuple(int(p) for p in value)


def _random_from_params(p, seed):
    real = str(p.get("real", "false")).lower() in ("1", "true", "yes")
    return random_pure(SystemShape(_dims_param(p["dims"])), seed, real=real)


# name -> (builder, required parameters, optional parameters with defaults)
CATALOG = {
    "ghz": (lambda p, seed: ghz(float(p["theta"])), ("theta",), {}),
    "w": (lambda p, seed: w(float(p["alpha"]), float(p["beta"]), float(p["gamma"])),
          ("alpha", "beta", "gamma"), {}),
    "qutrit-psi": (lambda p, seed: qutrit_psi(), (), {}),
    "example4-rho": (lambda p, seed: example4_pair()[0], (), {}),
    "example4-sigma": (lambda p, seed: example4_pair()[1], (), {}),
    "random": (_random_from_params, ("dims",), {"real": "false"}),
}


def build(name: str, params: dict | None = None, seed=None):
    """Construct a catalog state by name."""
    params = dict(params or {})
    if name not in CATALOG:
        raise ValidationError(f"unknown catalog state {name!r}; known: {', '.join(CATALOG)}",
                              "UNKNOWN_NAME")
    builder, required, optional = CATALOG[name]
    missing = [k for k in required if k not in params]
    if missing:
        raise ValidationError(f"{name} needs parameters {missing}", "BAD_PARAMETER")
    unknown = [k for k in params if k not in required and k not in optional]
    if unknown:
        raise ValidationError(f"{name} does not take parameters {unknown}", "BAD_PARAMETER")
    try:
        return builder(params, seed)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad parameter for {name}: {exc}", "BAD_PARAMETER") from exc
