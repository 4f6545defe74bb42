"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 parse/validation error, 3 3CE
infeasible, 4 annealing budget exhausted without reaching the target.
Errors are reported on stderr as one ``error: <code>: <message>`` line.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import ce3, compiler, dynamics, oracle
from .errors import NoSolution, TailorSatError
from .formula import Assignment, evaluate, gen_random, read_dimacs, serialize_dimacs

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_BUDGET = range(5)


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)


class UsageError(Exception):
    code = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2) + "\n"


def _write(path: str, text: str, artifacts: list[str]) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    artifacts.append(path)


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return lo, hi


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


def _solution(args) -> ce3.CE3Solution:
    gap_min = None if args.gap_min is None else args.gap_min * args.d
    sols = ce3.solve(args.b * args.d, args.d, args.f * args.d, gap_min)
    return ce3.best_solution(sols)


def _model(args):
    f = read_dimacs(args.cnf)
    sol = _solution(args)
    return f, compiler.compile(f, sol, None if args.gap_min is None else args.gap_min * args.d)


# subcommands --------------------------------------------------------------


def cmd_validate(args, out) -> int:
    f = read_dimacs(args.cnf)
    dups = f.duplicate_clauses()
    for d in dups:
        print(f"warning: duplicate clause {list(d)}", file=sys.stderr)
    out.write(_dump({"m": f.m, "n": f.n, "duplicates": len(dups), "valid": True}))
    return EXIT_OK


def cmd_ce3_solve(args, out) -> int:
    gap_min = None if args.gap_min is None else args.gap_min * args.d
    sols = ce3.solve(args.b * args.d, args.d, args.f * args.d, gap_min)
    out.write(_dump({
        "b": args.b * args.d, "d": args.d, "f": args.f * args.d,
        "gap_min": ce3.DEFAULT_GAP_MIN * args.d if gap_min is None else gap_min,
        "solutions": [s.as_dict() for s in sols],
    }))
    return EXIT_OK


def cmd_ce3_scan(args, out, artifacts) -> int:
    (b0, b1), (f0, f1) = args.b_range, args.f_range
    grid = ce3.scan_region(b0, b1, f0, f1, args.nb, args.nf,
                           ce3.DEFAULT_GAP_MIN if args.gap_min is None else args.gap_min,
                           workers=_threads(args))
    if args.csv:
        _write(args.csv, grid.to_csv(), artifacts)
    if args.pgm:
        _write(args.pgm, grid.to_pgm(), artifacts)
    out.write(_dump({"nb": args.nb, "nf": args.nf,
                     "feasible": int(grid.feasible.sum()), "cells": args.nb * args.nf}))
    return EXIT_OK


def cmd_compile(args, out) -> int:
    f, model = _model(args)
    net = compiler.build_netlist(f)
    out.write(_dump({
        "ce3": model.solution.as_dict(),
        "e_floor": model.e_floor,
        "netlist": net.to_dict(),
    }))
    return EXIT_OK


def cmd_energy(args, out) -> int:
    f, model = _model(args)
    a = Assignment.from_str(args.assignment)
    e = compiler.total_energy(model, a)
    ev = evaluate(f, a)
    out.write(_dump({
        "assignment": a.to_str(), "energy": e, "e_floor": model.e_floor, "gap": model.gap,
        "unsat_count": ev.unsat_count, "satisfied": ev.satisfied,
    }))
    return EXIT_OK


def cmd_spectrum(args, out) -> int:
    _, model = _model(args)
    rep = oracle.enumerate_spectrum(model, args.limit, workers=_threads(args))
    out.write(_dump(rep.to_dict(max_ground=args.max_ground)))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    f, model = _model(args)
    rep = oracle.check_encoding(f, model, args.limit, workers=_threads(args))
    out.write(_dump(rep.to_dict()))
    if not rep.ok:
        print("error: EncodingFailure: ground set differs from satisfying set", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_anneal(args, out, artifacts) -> int:
    f, model = _model(args)
    sch = dynamics.parse_schedule(args.schedule) if args.schedule else dynamics.default_schedule(model)
    if args.target is None:
        target = model.e_floor
    elif args.target == "ground":
        target = oracle.enumerate_spectrum(model, workers=_threads(args)).ground_energy
    else:
        target = float(args.target)
    cfg = dynamics.RunConfig(seed=args.seed, max_steps=args.steps, target_energy=target,
                             record_every=args.record_every)
    rep = dynamics.multi_restart(model, args.restarts, cfg, sch, workers=_threads(args))
    if args.trace:
        _write(args.trace, rep.per_run[0].trace_csv(), artifacts)
    body = rep.to_dict()
    body["target_energy"] = target
    out.write(_dump(body))
    return EXIT_OK if rep.success_rate > 0 else EXIT_BUDGET


def cmd_gen(args, out) -> int:
    f = gen_random(args.m, args.n, args.seed)
    out.write(serialize_dimacs(f, [f"random 3SAT m={args.m} n={args.n} seed={args.seed}"]))
    return EXIT_OK


def _add_ce3(p, cnf: bool = True) -> None:
    if cnf:
        p.add_argument("cnf")
    p.add_argument("--b", type=float, default=0.3, help="B/D (default 0.3)")
    p.add_argument("--f", type=float, default=1.0, help="F/D (default 1.0)")
    p.add_argument("--d", type=float, default=1.0, help="energy unit D (default 1)")
    p.add_argument("--gap-min", type=float, default=None, help="required gap / D (default 0.2)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tailorsat", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a 3SAT DIMACS file")
    p.add_argument("cnf")

    p = sub.add_parser("ce3-solve", help="tailor (A, E) for given B, F")
    _add_ce3(p, cnf=False)

    p = sub.add_parser("ce3-scan", help="feasibility map over (B/D, F/D)")
    p.add_argument("--b-range", type=_range, default=(0.01, 1.0))
    p.add_argument("--f-range", type=_range, default=(0.1, 3.0))
    p.add_argument("--nb", type=int, default=200)
    p.add_argument("--nf", type=int, default=200)
    p.add_argument("--gap-min", type=float, default=None)
    p.add_argument("--csv")
    p.add_argument("--pgm")
    p.add_argument("--threads", type=int, default=0)

    p = sub.add_parser("compile", help="netlist and energy model summary")
    _add_ce3(p)

    p = sub.add_parser("energy", help="landscape energy of one assignment")
    _add_ce3(p)
    p.add_argument("--assignment", required=True, help="0/1 string, variable 1 first")

    for name, help_ in (("spectrum", "exhaustive energy spectrum"),
                        ("verify", "check the ground-state encoding")):
        p = sub.add_parser(name, help=help_)
        _add_ce3(p)
        p.add_argument("--limit", type=int, default=oracle.DEFAULT_LIMIT)
        p.add_argument("--threads", type=int, default=0)
        if name == "spectrum":
            p.add_argument("--max-ground", type=int, default=1000,
                           help="cap on listed ground assignments")

    p = sub.add_parser("anneal", help="Metropolis relaxation with restarts")
    _add_ce3(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=10**6)
    p.add_argument("--schedule", help="const:T or geo:T0,r,stage (default geo:2*gap,0.97,10*m)")
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--target", help="energy, or 'ground' (exhaustive); default e_floor")
    p.add_argument("--record-every", type=int, default=1000)
    p.add_argument("--trace", help="CSV path for the first run's trace")
    p.add_argument("--threads", type=int, default=0)

    p = sub.add_parser("gen", help="random 3SAT instance to stdout")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return ap


def run_cli(argv: list[str], out=None) -> CommandOutcome:
    out = sys.stdout if out is None else out
    artifacts: list[str] = []
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: UsageError: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_USAGE)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handlers = {
        "validate": cmd_validate, "ce3-solve": cmd_ce3_solve, "compile": cmd_compile,
        "energy": cmd_energy, "spectrum": cmd_spectrum, "verify": cmd_verify, "gen": cmd_gen,
    }
    try:
        if args.cmd == "ce3-scan":
            code = cmd_ce3_scan(args, out, artifacts)
        elif args.cmd == "anneal":
            code = cmd_anneal(args, out, artifacts)
        else:
            code = handlers[args.cmd](args, out)
    except NoSolution as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_INFEASIBLE, artifacts)
    except TailorSatError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_INVALID, artifacts)
    except OSError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_INVALID, artifacts)
    except ValueError as exc:
        print(f"error: ValueError: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_USAGE, artifacts)
    return CommandOutcome(code, artifacts)


def main(argv: list[str] | None = None) -> int:
    return run_cli(sys.argv[1:] if argv is None else argv).exit_code


if __name__ == "__main__":
    sys.exit(main())
