"""Command-line interface.

Exit codes: 0 solved / valid, 1 infeasible / invalid, 2 usage or input error,
3 search budget exhausted.  Results go to stdout (or ``--out``) as JSON; a
one-line run report with the elapsed time goes to stderr so stdout stays
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import coloring, oracle, selftest, solver22
from .matrix import (
    ReconstructionInstance,
    WindowShape,
    as_matrix,
    lift_solution,
    load_instance,
    shift_two_sided,
    verify_solution,
    window_sums,
)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

ALGOS = {
    "binary": solver22.solve_binary,
    "bounded": solver22.solve_bounded,
    "bounded-noenum": solver22.solve_bounded_noenum,
}


class UsageError(Exception):
    pass


def _read_json(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _read_matrix(path, key="A"):
    doc = _read_json(path)
    if isinstance(doc, dict):
        if key not in doc:
            raise UsageError(f"{path}: expected a matrix or an object with key {key!r}")
        doc = doc[key]
    return as_matrix(doc, key)


def _emit(doc, out=None):
    text = json.dumps(doc, separators=(",", ":")) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(verdict, start, path=None):
    ms = (time.perf_counter() - start) * 1000
    extra = f" solution={path}" if path else ""
    print(f"verdict={verdict} elapsed_ms={ms:.1f}{extra}", file=sys.stderr)


def cmd_sum(args):
    a = _read_matrix(args.matrix)
    _emit({"S": window_sums(a, WindowShape(*args.window)).tolist()}, args.out)
    return EXIT_OK


def solve_instance(inst: ReconstructionInstance, algo: str, budget: int):
    """Solve with the chosen algorithm; lower bounds are shifted out first."""
    back = None
    work = inst
    if inst.lower is not None:
        work, back = shift_two_sided(inst)
    if algo == "brute":
        a = oracle.brute_solve(work, oracle.SearchBudget(budget))
    else:
        if (inst.shape.height, inst.shape.width) != (2, 2):
            raise UsageError(f"--algo {algo} needs a 2x2 window")
        if algo == "binary" and not np.isin(work.upper, (0, 1)).all():
            raise UsageError("--algo binary needs U - L cells in {0, 1}")
        if (work.upper < 0).any():
            return None
        a = ALGOS[algo](work.sums, work.upper)
    if a is not None and back is not None:
        a = lift_solution(a, back)
    return a


def cmd_solve(args):
    start = time.perf_counter()
    inst = load_instance(args.instance)
    try:
        a = solve_instance(inst, args.algo, args.budget)
    except oracle.BudgetExhausted:
        _report("budget-exhausted", start)
        return EXIT_BUDGET
    if a is None:
        _emit({"verdict": "infeasible"}, args.out)
        _report("infeasible", start)
        return EXIT_NO
    _emit({"verdict": "solved", "A": a.tolist()}, args.out)
    _report("solved", start, args.out)
    return EXIT_OK


def cmd_verify(args):
    inst = load_instance(args.instance)
    verdict = verify_solution(_read_matrix(args.solution), inst)
    _emit({"valid": verdict.ok, "reason": verdict.reason})
    return EXIT_OK if verdict else EXIT_NO


def cmd_reduce3col(args):
    with open(args.graph) as fh:
        g = coloring.parse_graph(fh.read())
    inst, record = coloring.reduce_3col(g)
    _emit(inst.to_json(), args.out)
    with open(args.record, "w") as fh:
        json.dump(record.to_json(), fh, separators=(",", ":"))
        fh.write("\n")
    if args.witness:
        col = coloring.brute_force_3col(g)
        if col is None:
            print("graph is not 3-colorable; no witness written", file=sys.stderr)
            return EXIT_NO
        _emit({"A": coloring.witness_for_coloring(record, col).tolist()}, args.witness)
    return EXIT_OK


def cmd_decode3col(args):
    record = coloring.ReductionRecord.from_json(_read_json(args.record))
    try:
        colors = coloring.decode_coloring(_read_matrix(args.solution), record)
    except ValueError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_NO
    _emit({"coloring": colors})
    return EXIT_OK


def cmd_gen(args):
    # numpy's default_rng is PCG64 seeded from the integer --seed
    rng = np.random.default_rng(args.seed)
    shape = WindowShape(*args.window)
    inst = selftest.random_instance(rng, args.rows, args.cols, args.umax, args.from_random_matrix, shape)
    _emit(inst.to_json(), args.out)
    return EXIT_OK


def cmd_selftest(args):
    return EXIT_OK if selftest.run(args.level, args.seed) else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="windowsum", description="Reconstruct integer matrices from window sums.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sum", help="window sums of a matrix")
    p.add_argument("matrix")
    p.add_argument("--window", nargs=2, type=int, default=[2, 2], metavar=("H", "W"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("instance")
    p.add_argument("--algo", choices=[*ALGOS, "brute"], default="bounded")
    p.add_argument("--budget", type=int, default=oracle.DEFAULT_MAX_NODES, help="node budget for --algo brute")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce3col", help="reduce graph 3-coloring to a 2x3 instance")
    p.add_argument("graph")
    p.add_argument("--out", required=True)
    p.add_argument("--record", required=True)
    p.add_argument("--witness", help="also write a solution built from a brute-forced coloring")
    p.set_defaults(func=cmd_reduce3col)

    p = sub.add_parser("decode3col", help="turn a solution of a reduced instance into a coloring")
    p.add_argument("solution")
    p.add_argument("record")
    p.set_defaults(func=cmd_decode3col)

    p = sub.add_parser("gen", help="random instance")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--umax", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", nargs=2, type=int, default=[2, 2], metavar=("H", "W"))
    p.add_argument("--from-random-matrix", action="store_true", help="sum a random A <= U so the instance is feasible")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="randomized cross-checks against brute force")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
