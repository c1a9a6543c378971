"""Command-line front end.

Exit codes: 0 success / inconclusive, 1 not equivalent, 2 parse or usage
error, 3 state validation error, 4 shape or convention mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import catalog, files
from .equivalence import DEFAULT_TOL, NOT_EQUIVALENT, compare, render_report
from .errors import ComparisonError, FormatError, LUInvError, ValidationError
from .invariants import Fingerprint, full_fingerprint
from .multilinear import PureState

TOL_ENV = "LUINV_TOL"

EXIT_OK, EXIT_DIFFERENT, EXIT_PARSE, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2, 3, 4

TABLE_HEADER = (
    "# coefficients c_0 .. c_D of det(lambda*I - M) in ascending powers of lambda (c_D = 1).\n"
    "# literal: M = Omega; robust: M = Omega*conj(Omega).\n"
    "# descending listing: C_a = c_(D-a), i.e. read each row right to left."
)


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise FormatError(f"{TOL_ENV}={raw!r} is not a number") from None


def _fmt(z: complex) -> str:
    re = 0.0 if abs(z.real) < 5e-16 else z.real
    if abs(z.imag) < 1e-12:
        return f"{re:.10g}"
    return f"{re:.10g}{z.imag:+.3g}j"


def _parse_subsets(text: str) -> list[tuple[int, ...]]:
    out = []
    for part in text.replace(" ", ";").split(";"):
        if not part:
            continue
        try:
            out.append(tuple(int(p) for p in part.split(",") if p))
        except ValueError:
            raise FormatError(f"cannot parse subset {part!r}; use e.g. '1,2;2,3'") from None
    if not out:
        raise FormatError("empty --subsets")
    return out


def print_table(fp: Fingerprint, out=None, robust_only=False) -> None:
    out = out or sys.stdout
    print(TABLE_HEADER, file=out)
    print(f"dims: {tuple(fp.dims)}", file=out)
    print("one-body spectra (descending):", file=out)
    for i, spectrum in enumerate(fp.one_body_spectra, start=1):
        print(f"  {i}: " + ", ".join(f"{x:.10g}" for x in spectrum), file=out)
    for (subset, x), s in fp.invariant_sets.items():
        flags = []
        if s.degenerate:
            flags.append("degenerate")
        if s.complex_source:
            flags.append("complex")
        if s.convention_dependent:
            flags.append("literal-basis-dependent")
        tag = f" [{', '.join(flags)}]" if flags else ""
        print(f"subset {{{','.join(map(str, subset))}}} x={x} rank={s.rank}{tag}", file=out)
        if s.literal is not None and not robust_only:
            print("  literal: " + ", ".join(_fmt(z) for z in s.literal), file=out)
        print("  robust:  " + ", ".join(_fmt(z) for z in s.robust), file=out)


def _fingerprint(state, args) -> Fingerprint:
    subsets = _parse_subsets(args.subsets) if args.subsets else None
    max_k = args.max_k if args.max_k is not None else min(2, state.shape.n)
    return full_fingerprint(state, max_subset_size=max_k, all_positions=args.all_positions,
                            subsets=subsets, robust_only=args.robust_only)


def _like(state, fp: Fingerprint) -> Fingerprint:
    """Fingerprint ``state`` with the conventions and keys recorded in ``fp``."""
    meta = fp.metadata
    subsets = sorted({s for s, _ in fp.invariant_sets})
    return full_fingerprint(state, subsets=subsets,
                            all_positions=meta.get("positions") == "all",
                            robust_only=bool(meta.get("robust_only")))


def cmd_invariants(args) -> int:
    state = files.read_state(args.state)
    fp = _fingerprint(state, args)
    if args.out:
        files.write_fingerprint(fp, args.out)
    print_table(fp, robust_only=args.robust_only)
    return EXIT_OK


def cmd_compare(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    a, b = files.read_any(args.a), files.read_any(args.b)
    if isinstance(a, Fingerprint) and isinstance(b, Fingerprint):
        fa, fb = a, b
    elif isinstance(a, Fingerprint):
        fa, fb = a, _like(b, a) if tuple(b.shape.dims) == tuple(a.dims) else None
    elif isinstance(b, Fingerprint):
        fa, fb = (_like(a, b) if tuple(a.shape.dims) == tuple(b.dims) else None), b
    else:
        if tuple(a.shape.dims) != tuple(b.shape.dims):
            raise ComparisonError(f"shapes differ: {a.shape.dims} vs {b.shape.dims}",
                                  "SHAPE_MISMATCH")
        fa, fb = _fingerprint(a, args), _fingerprint(b, args)
    if fa is None or fb is None:
        raise ComparisonError("state and fingerprint have different shapes", "SHAPE_MISMATCH")
    verdict = compare(fa, fb, tol)
    if args.json:
        print(json.dumps(_verdict_json(verdict), indent=1))
    else:
        sys.stdout.write(render_report(verdict, {"label": str(args.a), "dims": fa.dims},
                                       {"label": str(args.b), "dims": fb.dims}))
    return EXIT_DIFFERENT if verdict.outcome == NOT_EQUIVALENT else EXIT_OK


def _witness_json(w):
    return {
        "quantity": w.quantity,
        "subset": list(w.subset),
        "position": w.position,
        "index": w.index,
        "a": files.enc_c(w.a_value),
        "b": files.enc_c(w.b_value),
        "difference": files.enc(w.difference),
    }


def _verdict_json(v) -> dict:
    return {
        "outcome": v.outcome,
        "tolerance": files.enc(v.tolerance),
        "witness": None if v.witness is None else _witness_json(v.witness),
        "discrepancies": [_witness_json(w) for w in v.discrepancies],
        "robust_only": [{"subset": list(s), "position": x} for s, x in v.robust_only_keys],
        "compared": v.compared,
    }


def _parse_params(items) -> dict:
    params = {}
    for item in [p for group in (items or []) for p in group]:
        if "=" not in item:
            raise ValidationError(f"parameter {item!r} is not of the form key=value",
                                  "BAD_PARAMETER")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    return params


def cmd_example(args) -> int:
    try:
        state = catalog.build(args.name, _parse_params(args.param), seed=args.seed)
        if args.lu_seed is not None:
            if not isinstance(state, PureState):
                raise ValidationError("--lu-seed needs a pure state", "BAD_PARAMETER")
            state = catalog.lu_orbit(state, args.lu_seed)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = files.dumps_state(state)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_selection(p):
    p.add_argument("--subsets", help="explicit subsets, e.g. '1,2;1,3;1,2,3'")
    p.add_argument("--max-k", type=int, default=None,
                   help="use every subset of size 2..K (default 2)")
    p.add_argument("--all-positions", action="store_true",
                   help="include every unfolding position, not only x=1")
    p.add_argument("--robust-only", action="store_true",
                   help="omit literal coefficients")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="luinv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="compute the invariant fingerprint of a state file")
    p.add_argument("state")
    _add_selection(p)
    p.add_argument("--out", help="write the fingerprint file here")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("compare", help="compare two states or fingerprints")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=None,
                   help=f"absolute tolerance (default ${TOL_ENV} or {DEFAULT_TOL:g})")
    p.add_argument("--json", action="store_true", help="machine-readable verdict")
    _add_selection(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("example", help="emit a catalog state file")
    p.add_argument("name", help=", ".join(catalog.CATALOG))
    p.add_argument("--param", action="append", nargs="+", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lu-seed", type=int, default=None,
                   help="push the state through Haar-random local unitaries")
    p.add_argument("--out")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ComparisonError as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except LUInvError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
