"""Command-line front end.

Results go to stdout, diagnostics to stderr.  Exit status: 0 for VALID
(or any successful non-verdict command), 1 for INVALID, 2 for errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import circuits
from .errors import BudgetExceeded, StreamLogicError, UnsupportedFragment
from .expand import bisim_formula
from .logic import free_vars, parse, term_text, to_text
from .qe import DEFAULT_BUDGET, decide_full, eliminate, poly_to_term
from .streams import eval_stream

log = logging.getLogger("streamlogic")

EXIT = {"VALID": 0, "INVALID": 1}
STATUS = {BudgetExceeded: "BUDGET", UnsupportedFragment: "UNSUPPORTED"}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _source(args) -> str:
    if getattr(args, "expr", None) is not None:
        return args.expr
    if args.path is None:
        raise SystemExit("a file path or --expr is required")
    return _read(args.path)


def _report(decision, trace: bool) -> None:
    s = decision.stats
    log.info("polynomials %d, splits %d, elapsed %.3fs",
             s["polys"], s["splits"], decision.elapsed)
    for var, num, den in decision.witnesses:
        log.info("witness %s = (%s)/(%s)", var,
                 term_text(poly_to_term(num)), term_text(poly_to_term(den)))
    if trace:
        for line in decision.trace:
            print(f"trace: {line}", file=sys.stderr)


def _verdict(formula, args) -> int:
    d = decide_full(formula, budget=args.budget, presolve=not args.no_presolve)
    print(d.status)
    _report(d, args.trace)
    return EXIT[d.status]


def cmd_decide(args) -> int:
    return _verdict(parse(_source(args)), args)


def cmd_eliminate(args) -> int:
    f = parse(_source(args))
    print(to_text(eliminate(f, budget=args.budget, presolve=not args.no_presolve)))
    return 0


def cmd_coeffs(args) -> int:
    ts = eval_stream(args.expr, args.count)
    if ts.start:
        print(f"first index {ts.start}", file=sys.stderr)
    print(" ".join(str(c) for c in ts.coeffs))
    return 0


def cmd_circuit(args) -> int:
    c = circuits.parse_circuit(_read(args.path))
    if args.equiv:
        same = circuits.equiv(c, circuits.parse_circuit(_read(args.equiv)))
        print("EQUIVALENT" if same else "DIFFERENT")
        return 0 if same else 1
    if args.verify:
        claim = parse(_read(args.verify))
        return _verdict(circuits.encode_logic(c, claim), args)
    print(circuits.transfer(c))
    return 0


def cmd_bisim(args) -> int:
    b = parse(_source(args))
    extra = free_vars(b) - {"x", "y"}
    if extra:
        raise StreamLogicError(f"the relation may only mention x and y, not {sorted(extra)}")
    return _verdict(bisim_formula(b), args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="streamlogic",
                                description="Decide first-order formulas over rational streams.")
    sub = p.add_subparsers(dest="command", required=True)

    def engine_flags(sp, *, source=True):
        if source:
            sp.add_argument("path", nargs="?", help="input file, or - for stdin")
            sp.add_argument("-e", "--expr", help="formula given inline")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="ceiling on generated polynomials")
        sp.add_argument("--trace", action="store_true", help="log each rewrite step")
        sp.add_argument("--no-presolve", action="store_true",
                        help="disable linear substitution before and during elimination")

    sp = sub.add_parser("decide", help="decide a sentence")
    engine_flags(sp)
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("eliminate", help="print a quantifier-free equivalent")
    engine_flags(sp)
    sp.set_defaults(func=cmd_eliminate)

    sp = sub.add_parser("coeffs", help="print leading coefficients of a stream")
    sp.add_argument("expr")
    sp.add_argument("--count", type=int, default=8)
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("circuit", help="transfer functions and circuit checks")
    sp.add_argument("path")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--transfer", action="store_true", help="print the transfer matrix (default)")
    mode.add_argument("--equiv", metavar="OTHER", help="compare with another circuit")
    mode.add_argument("--verify", metavar="CLAIM", help="decide a claim about the circuit")
    engine_flags(sp, source=False)
    sp.set_defaults(func=cmd_circuit)

    sp = sub.add_parser("bisim", help="check that a relation on x, y is a bisimulation")
    engine_flags(sp)
    sp.set_defaults(func=cmd_bisim)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "trace", False) else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except StreamLogicError as exc:
        print(STATUS.get(type(exc), exc.code))
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
    except OSError as exc:
        print("IO_ERROR")
        print(f"error: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
