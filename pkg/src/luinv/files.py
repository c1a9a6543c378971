"""JSON state and fingerprint files.

All real numbers are written as 17-significant-digit decimal strings, which
round-trip IEEE doubles exactly and keep files diff-able. Complex numbers are
``[re, im]`` pairs. Readers also accept plain JSON numbers.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import FormatError
from .invariants import Fingerprint, InvariantSet
from .multilinear import DensityMatrix, PureState, SystemShape, validate_density, validate_pure

VERSION = 1
_FLOAT_CONVENTIONS = ("rank_cutoff", "degeneracy_rtol")


def enc(x: float) -> str:
    return format(float(x), ".17g")


def enc_c(z: complex) -> list[str]:
    return [enc(z.real), enc(z.imag)]


def _num(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (str, int, float)):
        raise FormatError(f"{where}: expected a number, got {v!r}")
    try:
        return float(v)
    except ValueError:
        raise FormatError(f"{where}: cannot parse {v!r} as a number") from None


def _cnum(v, where: str) -> complex:
    if not isinstance(v, list) or len(v) != 2:
        raise FormatError(f"{where}: expected an [re, im] pair, got {v!r}")
    return complex(_num(v[0], where + "[0]"), _num(v[1], where + "[1]"))


def _cvec(seq, where: str) -> np.ndarray:
    if not isinstance(seq, list):
        raise FormatError(f"{where}: expected a list")
    return np.array([_cnum(v, f"{where}[{k}]") for k, v in enumerate(seq)], dtype=complex)


def _load(source) -> dict:
    if isinstance(source, str) and source.lstrip()[:1] in ("{", "["):
        text, name = source, "<string>"
    else:
        name = str(source)
        try:
            text = Path(source).read_text()
        except (OSError, TypeError) as exc:
            raise FormatError(f"cannot read {name}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{name}: invalid JSON at line {exc.lineno} column {exc.colno} "
            f"(char {exc.pos}): {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{name}: top level must be an object")
    if doc.get("version") != VERSION:
        raise FormatError(f"{name}: unsupported version {doc.get('version')!r}")
    return doc


def _dims(doc) -> tuple[int, ...]:
    dims = doc.get("dims")
    if (not isinstance(dims, list) or not dims
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims)):
        raise FormatError(f"dims must be a non-empty list of positive integers, got {dims!r}")
    return tuple(dims)


# -- state files ------------------------------------------------------------

def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        data = [enc_c(z) for z in state.amplitudes]
        kind = "pure"
    else:
        data = [[enc_c(z) for z in row] for row in state.matrix]
        kind = "mixed"
    return {"version": VERSION, "kind": kind, "dims": list(state.shape.dims), "data": data}


def dumps_state(state) -> str:
    return json.dumps(state_to_dict(state), indent=1) + "\n"


def write_state(state, path) -> None:
    Path(path).write_text(dumps_state(state))


def state_from_dict(doc: dict):
    dims = _dims(doc)
    total = SystemShape(dims).total
    data = doc.get("data")
    kind = doc.get("kind")
    if kind == "pure":
        if not isinstance(data, list) or len(data) != total:
            n = len(data) if isinstance(data, list) else None
            raise FormatError(f"pure state over dims {dims} needs {total} amplitudes, got {n}")
        return validate_pure(_cvec(data, "data"), dims)
    if kind == "mixed":
        if not isinstance(data, list) or len(data) != total:
            raise FormatError(f"mixed state over dims {dims} needs {total} rows")
        rows = []
        for r, row in enumerate(data):
            if not isinstance(row, list) or len(row) != total:
                raise FormatError(f"row {r} of the density matrix must have {total} entries")
            rows.append(_cvec(row, f"data[{r}]"))
        return validate_density(np.array(rows), dims)
    raise FormatError(f"kind must be 'pure' or 'mixed', got {kind!r}")


def read_state(source):
    return state_from_dict(_load(source))


# -- fingerprint files --------------------------------------------------------

def fingerprint_to_dict(fp: Fingerprint) -> dict:
    conv = {k: (enc(v) if k in _FLOAT_CONVENTIONS else v) for k, v in fp.metadata.items()}
    sets = []
    for (subset, x), s in fp.invariant_sets.items():
        sets.append({
            "subset": list(subset),
            "position": x,
            "rank": s.rank,
            "degenerate": s.degenerate,
            "complex_source": s.complex_source,
            "literal": None if s.literal is None else [enc_c(z) for z in s.literal],
            "robust": [enc_c(z) for z in s.robust],
        })
    return {
        "version": VERSION,
        "type": "fingerprint",
        "dims": list(fp.dims),
        "conventions": conv,
        "one_body_spectra": [[enc(x) for x in spectrum] for spectrum in fp.one_body_spectra],
        "invariant_sets": sets,
    }


def dumps_fingerprint(fp: Fingerprint) -> str:
    return json.dumps(fingerprint_to_dict(fp), indent=1) + "\n"


def write_fingerprint(fp: Fingerprint, path) -> None:
    Path(path).write_text(dumps_fingerprint(fp))


def fingerprint_from_dict(doc: dict) -> Fingerprint:
    dims = _dims(doc)
    conv = doc.get("conventions")
    if not isinstance(conv, dict):
        raise FormatError("conventions must be an object")
    conv = {k: (_num(v, f"conventions.{k}") if k in _FLOAT_CONVENTIONS else v)
            for k, v in conv.items()}
    spectra = doc.get("one_body_spectra")
    if not isinstance(spectra, list) or len(spectra) != len(dims):
        raise FormatError(f"one_body_spectra must list {len(dims)} spectra")
    spectra = tuple(np.array([_num(x, f"one_body_spectra[{i}]") for x in spectrum])
                    for i, spectrum in enumerate(spectra))
    for i, (spectrum, d) in enumerate(zip(spectra, dims)):
        if spectrum.size != d:
            raise FormatError(f"one_body_spectra[{i}] must have {d} entries")
    raw = doc.get("invariant_sets")
    if not isinstance(raw, list):
        raise FormatError("invariant_sets must be a list")
    sets = {}
    for n, item in enumerate(raw):
        where = f"invariant_sets[{n}]"
        try:
            subset = tuple(int(i) for i in item["subset"])
            x = int(item["position"])
            literal = None if item["literal"] is None else _cvec(item["literal"], where + ".literal")
            robust = _cvec(item["robust"], where + ".robust")
            s = InvariantSet(subset=subset, position=x, literal=literal, robust=robust,
                             degenerate=bool(item["degenerate"]),
                             complex_source=bool(item["complex_source"]), rank=int(item["rank"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"{where}: malformed entry ({exc!r})") from None
        if (subset, x) in sets:
            raise FormatError(f"{where}: duplicate key {subset}, x={x}")
        sets[(subset, x)] = s
    return Fingerprint(dims=dims, one_body_spectra=spectra,
                       invariant_sets={k: sets[k] for k in sorted(sets)}, metadata=conv)


def read_fingerprint(source) -> Fingerprint:
    return fingerprint_from_dict(_load(source))


def read_any(source):
    """Read either a state file or a fingerprint file."""
    doc = _load(source)
    if doc.get("type") == "fingerprint" or "invariant_sets" in doc:
        return fingerprint_from_dict(doc)
    return state_from_dict(doc)
