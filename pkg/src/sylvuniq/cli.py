"""Command-line front end.

Exit codes: 0 unique / success, 3 not unique (or no unique solution),
4 indeterminate, 1 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from .exceptions import ParseError, ValidationError
from .instances import GenSpec, counterexample_facts, random_system
from .model import matrix_to_json, parse_system, serialize_system
from .numeric import Tolerances
from .oracle import SolveStatus, solve
from .pencils import Variant
from .reduction import reduce_system
from .uniqueness import Verdict, verdict_general
from .verify import run_verification

EXIT_UNIQUE = 0
EXIT_ERROR = 1
EXIT_NOT_UNIQUE = 3
EXIT_INDETERMINATE = 4


def exit_code(verdict: Verdict) -> int:
    """A definite failure in some component wins over ambiguity elsewhere."""
    if not verdict.unique and any(not c.unique and not c.indeterminate for c in verdict.components):
        return EXIT_NOT_UNIQUE
    if verdict.indeterminate:
        return EXIT_INDETERMINATE
    return EXIT_UNIQUE if verdict.unique else EXIT_NOT_UNIQUE


def _tolerances(args) -> Tolerances:
    return Tolerances(rank_rel=args.rank_rel, sep_chordal=args.sep_chordal,
                      inf_theta=args.inf_theta, regular_rel=args.regular_rel,
                      ambiguous_lo=args.ambiguous_lo, ambiguous_hi=args.ambiguous_hi)


def _load(path: str):
    data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    return parse_system(data)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def build_report(system, tol: Tolerances, variant: Variant = Variant.MAIN) -> dict:
    t0 = time.perf_counter()
    reduce_system(system, tol)
    t1 = time.perf_counter()
    verdict = verdict_general(system, tol, variant)
    t2 = time.perf_counter()
    spectra = []
    for c in verdict.components:
        spectra.append(None if c.periodic is None
                       else [None if s is None else s.to_json() for s in c.periodic.spectra])
    return {
        "verdict": verdict.to_json(),
        "reason": verdict.reason.to_json(),
        "spectra": spectra,
        "traces": [t.to_json() for t in verdict.traces],
        "timings": {"reduction_ms": 1e3 * (t1 - t0), "verdict_ms": 1e3 * (t2 - t1)},
        "indeterminate": verdict.indeterminate,
        "exit_code": exit_code(verdict),
    }


def _print_report(report: dict, show_trace: bool) -> None:
    v = report["verdict"]
    if report["indeterminate"]:
        label = "INDETERMINATE"
    else:
        label = "UNIQUE" if v["unique"] else "NOT UNIQUE"
    print(f"verdict: {label}")
    print(f"reason:  {report['reason']['kind']}")
    for k, comp in enumerate(v["components"]):
        trace = comp["trace"]
        line = f"  component {k}: equations {trace['equations']} -> {comp['kind']}"
        if trace["terminal"] is not None:
            line += f", cycle {trace['cycle']} ({trace['terminal']} closing link)"
        line += f", {'unique' if comp['unique'] else 'not unique'} [{comp['reason']['kind']}]"
        if "pencils" in comp and comp["pencils"]["gap"] is not None:
            line += f", spectral gap {comp['pencils']['gap']:.3e}"
        print(line)
        if show_trace:
            print("    " + json.dumps(trace))


def cmd_analyze(args) -> int:
    try:
        system = _load(args.path)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = build_report(system, _tolerances(args), Variant(args.variant))
    if args.json:
        if not args.trace:
            report.pop("traces")
        _emit(report)
    else:
        _print_report(report, args.trace)
    return report["exit_code"]


def cmd_solve(args) -> int:
    try:
        system = _load(args.path)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    result = solve(system, _tolerances(args))
    out = {"status": result.status.value, "nullity": result.nullity, "residual": result.residual}
    if result.solutions is not None:
        key = "solutions" if result.status is SolveStatus.UNIQUE else "particular"
        out[key] = {str(k): matrix_to_json(X) for k, X in result.solutions.items()}
    if args.json:
        _emit(out)
    else:
        print(f"status: {out['status']} (nullity {result.nullity}, residual {result.residual:.3e})")
        for k, X in (result.solutions or {}).items():
            print(f"X{k} =")
            for row in X:
                print("   " + "  ".join(f"{z.real:+.10g}{z.imag:+.10g}j" for z in row))
    return EXIT_UNIQUE if result.status is SolveStatus.UNIQUE else EXIT_NOT_UNIQUE


def cmd_verify(args) -> int:
    summary = run_verification(args.trials, args.seed, args.max_m, args.max_n, args.max_r,
                               _tolerances(args), jobs=args.jobs)
    if args.json:
        _emit(summary.to_json())
    else:
        counts = summary.counts()
        print(f"trials: {len(summary.trials)}  " + "  ".join(f"{k}={v}" for k, v in counts.items()))
        for t in summary.disagreements:
            print(json.dumps({**t.to_json(), "system": json.loads(serialize_system(t.system))}))
        print("PASS" if summary.passed else "FAIL")
    return EXIT_UNIQUE if summary.passed else EXIT_NOT_UNIQUE


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(m=args.m, n=args.n, r=args.r, conj=args.conj,
                       plant=None if args.plant == "none" else args.plant,
                       chain=args.chain, scramble=args.scramble, rhs=args.rhs, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    data = serialize_system(random_system(spec))
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8") + "\n")
    return EXIT_UNIQUE


def repro(first=None, second=None, tol: Tolerances = Tolerances(), as_json: bool = False) -> int:
    """Check the counterexample facts on the given fixtures (defaults: the
    built-in ones) and print them; returns 0 iff every fact holds."""
    facts = counterexample_facts(first, second, tol)
    ok = all(f.ok for f in facts)
    if as_json:
        _emit({"ok": ok, "facts": [f.to_json() for f in facts]})
    else:
        for f in facts:
            print(f"[{'ok' if f.ok else 'FAILED'}] {f.name}")
            print("       " + json.dumps(f.detail, default=str))
        print("all facts reproduced" if ok else "MISMATCH")
    return 0 if ok else 2


def cmd_repro(args) -> int:
    return repro(tol=_tolerances(args), as_json=args.json)


def _add_tol_flags(p: argparse.ArgumentParser) -> None:
    d = Tolerances()
    p.add_argument("--rank-rel", type=float, default=d.rank_rel)
    p.add_argument("--sep-chordal", type=float, default=d.sep_chordal)
    p.add_argument("--inf-theta", type=float, default=d.inf_theta)
    p.add_argument("--regular-rel", type=float, default=d.regular_rel)
    p.add_argument("--ambiguous-lo", type=float, default=d.ambiguous_lo)
    p.add_argument("--ambiguous-hi", type=float, default=d.ambiguous_hi)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sylvuniq",
        description="Decide uniqueness of solution for systems of generalized "
                    "Sylvester and conjugate-Sylvester equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="decide uniqueness of a system file")
    p.add_argument("path", help="system JSON file, or - for stdin")
    p.add_argument("--json", action="store_true")
    p.add_argument("--trace", action="store_true", help="include reduction traces")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="main")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("solve", help="solve a system with right-hand sides")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="seeded agreement trials against the oracle")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-m", type=int, default=4)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--max-r", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--conj", choices=["plain", "terminal", "random"], default="random")
    p.add_argument("--plant", choices=["none", "shared"], default="none")
    p.add_argument("--chain", type=int, default=0)
    p.add_argument("--scramble", action="store_true")
    p.add_argument("--rhs", action="store_true", help="attach random right-hand sides")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("repro-counterexample", help="reproduce the two-link counterexample")
    p.add_argument("--json", action="store_true")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
