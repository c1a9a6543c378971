"""Fingerprint comparison: certify non-equivalence or report inconclusive."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ComparisonError
from .invariants import Fingerprint

NOT_EQUIVALENT = "NOT_EQUIVALENT"
INCONCLUSIVE = "INCONCLUSIVE"
DEFAULT_TOL = 1e-8

CAVEAT = ("INCONCLUSIVE does not mean the states are LU-equivalent: equal invariants "
          "are a necessary condition for equivalence, not a sufficient one.")


@dataclass(frozen=True)
class Witness:
    quantity: str                 # "spectrum", "literal" or "robust"
    subset: tuple[int, ...]       # (i,) for a one-body spectrum
    position: Optional[int]
    index: int                    # eigenvalue index or power of lambda
    a_value: complex
    b_value: complex
    difference: float

    def key(self) -> str:
        if self.quantity == "spectrum":
            return f"spectrum[{self.subset[0]}][{self.index}]"
        sub = ",".join(map(str, self.subset))
        return f"{self.quantity}({sub};x={self.position})[c{self.index}]"


@dataclass(frozen=True)
class Verdict:
    outcome: str
    tolerance: float
    witness: Optional[Witness] = None
    discrepancies: tuple[Witness, ...] = ()
    robust_only_keys: tuple = ()
    compared: int = 0
    flags: dict = field(default_factory=dict)


def _diffs(quantity, subset, position, a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    d = np.abs(a - b)
    return [Witness(quantity, subset, position, int(k), complex(a[k]), complex(b[k]), float(d[k]))
            for k in np.flatnonzero(d > tol)]


def compare(a: Fingerprint, b: Fingerprint, tol: float = DEFAULT_TOL) -> Verdict:
    """Compare two fingerprints at absolute tolerance ``tol``.

    Order: one-body spectra, then each (subset, position) key in
    lexicographic order with literal before robust coefficients, ascending
    power. Literal coefficients are skipped for a key when either side is
    flagged degenerate with a complex source, since they then depend on the
    chosen eigenbasis. The first exceedance is the witness.
    """
    if tuple(a.dims) != tuple(b.dims):
        raise ComparisonError(f"shapes differ: {tuple(a.dims)} vs {tuple(b.dims)}",
                              "SHAPE_MISMATCH")
    if a.metadata != b.metadata:
        diff = sorted(k for k in set(a.metadata) | set(b.metadata)
                      if a.metadata.get(k) != b.metadata.get(k))
        raise ComparisonError(f"conventions differ in {diff}", "CONVENTION_MISMATCH")
    if a.keys() != b.keys():
        raise ComparisonError("fingerprints cover different subset/position collections",
                              "CONVENTION_MISMATCH")

    found, robust_only, compared = [], [], 0
    for i, (sa, sb) in enumerate(zip(a.one_body_spectra, b.one_body_spectra), start=1):
        found += _diffs("spectrum", (i,), None, sa, sb, tol)
        compared += len(sa)
    for key in a.keys():
        ia, ib = a.invariant_sets[key], b.invariant_sets[key]
        subset, x = key
        use_literal = (ia.literal is not None and ib.literal is not None
                       and not ia.convention_dependent and not ib.convention_dependent)
        if use_literal:
            found += _diffs("literal", subset, x, ia.literal, ib.literal, tol)
            compared += len(ia.literal)
        else:
            robust_only.append(key)
        found += _diffs("robust", subset, x, ia.robust, ib.robust, tol)
        compared += len(ia.robust)

    flags = {
        "degenerate": sorted(k for k in a.keys()
                             if a.invariant_sets[k].degenerate or b.invariant_sets[k].degenerate),
        "convention_dependent": sorted(
            k for k in a.keys()
            if a.invariant_sets[k].convention_dependent or b.invariant_sets[k].convention_dependent),
    }
    return Verdict(
        outcome=NOT_EQUIVALENT if found else INCONCLUSIVE,
        tolerance=tol,
        witness=found[0] if found else None,
        discrepancies=tuple(found),
        robust_only_keys=tuple(robust_only),
        compared=compared,
        flags=flags,
    )


def _fmt(z: complex) -> str:
    if abs(z.imag) <= 1e-15 * max(1.0, abs(z.real)):
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}j"


def _fmt_key(key) -> str:
    subset, x = key
    return f"{{{','.join(map(str, subset))}}} x={x}"


def render_report(v: Verdict, a_meta: dict | None = None, b_meta: dict | None = None,
                  max_listed: int = 10) -> str:
    a_meta, b_meta = a_meta or {}, b_meta or {}
    lines = [
        "LU invariant comparison",
        f"  A: {a_meta.get('label', 'A')}",
        f"  B: {b_meta.get('label', 'B')}",
    ]
    if "dims" in a_meta:
        lines.append(f"  dims: {tuple(a_meta['dims'])}")
    lines += [
        f"  tolerance: {v.tolerance:g} (absolute)",
        f"  quantities compared: {v.compared}",
        f"  outcome: {v.outcome}",
    ]
    if v.witness is not None:
        wt = v.witness
        lines += [
            "",
            f"witness: {wt.key()}",
            f"  A = {_fmt(wt.a_value)}",
            f"  B = {_fmt(wt.b_value)}",
            f"  |A - B| = {wt.difference:.6g}",
        ]
        extra = [d for d in v.discrepancies[1:]]
        if extra:
            lines.append(f"other differences ({len(extra)}):")
            for d in extra[:max_listed]:
                lines.append(f"  {d.key()}: A = {_fmt(d.a_value)}, B = {_fmt(d.b_value)}")
            if len(extra) > max_listed:
                lines.append(f"  ... {len(extra) - max_listed} more")
    if v.flags.get("degenerate"):
        lines.append("")
        lines.append("degenerate reductions: " + ", ".join(_fmt_key(k) for k in v.flags["degenerate"]))
    if v.robust_only_keys:
        lines.append("compared by robust variant only: "
                     + ", ".join(_fmt_key(k) for k in v.robust_only_keys))
    if v.outcome == INCONCLUSIVE:
        lines += ["", CAVEAT]
    return "\n".join(lines) + "\n"
