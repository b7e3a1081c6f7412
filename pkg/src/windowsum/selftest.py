"""Randomized cross-checks of every solver against its brute-force counterpart."""

from __future__ import annotations

import itertools

import numpy as np

from . import coloring, diffcon, gadget23, oracle, sat2, solver22
from .matrix import ReconstructionInstance, WindowShape, verify_solution, window_sums

W22 = WindowShape(2, 2)


def random_2cnf(rng, max_vars=12, max_clauses=40) -> sat2.TwoCnf:
    n = int(rng.integers(1, max_vars + 1))
    k = int(rng.integers(0, max_clauses + 1))
    lits = lambda: sat2.Literal(int(rng.integers(n)), bool(rng.integers(2)))  # noqa: E731
    return sat2.TwoCnf(n, [(lits(), lits()) for _ in range(k)])


def truth_table_sat(f: sat2.TwoCnf) -> bool:
    return any(f.evaluate(vals) for vals in itertools.product((False, True), repeat=f.num_vars))


def random_diff_system(rng, max_vars=5, max_cons=12, wmax=4) -> diffcon.DiffSystem:
    n = int(rng.integers(1, max_vars + 1))
    sys = diffcon.DiffSystem(n)
    for _ in range(int(rng.integers(0, max_cons + 1))):
        i, j = (int(v) for v in rng.integers(n, size=2))
        w = int(rng.integers(-wmax, wmax + 1))
        if i == j and w < 0:
            continue
        sys.add(i, j, w)
    return sys


def box_feasible(sys: diffcon.DiffSystem, radius=20) -> bool:
    """Exhaustive search over ``[-radius, radius]^n`` with the first variable at 0.

    Fixing one variable is harmless (solutions shift), and a feasible system has
    a shortest-path solution whose spread is at most ``(n - 1) * max|w|``.
    Constraints are checked as soon as both their variables are assigned.
    """
    n = sys.num_vars
    closing = [[] for _ in range(n)]
    for i, j, w in sys.constraints:
        closing[max(i, j)].append((i, j, w))
    vals = [0] * n

    def place(k):
        if k == n:
            return True
        for v in (range(-radius, radius + 1) if k else (0,)):
            vals[k] = v
            if all(vals[i] - vals[j] <= w for i, j, w in closing[k]) and place(k + 1):
                return True
        return False

    return place(0)


def random_instance(rng, rows, cols, umax, feasible: bool, shape=W22) -> ReconstructionInstance:
    U = rng.integers(0, umax + 1, size=(rows, cols))
    if feasible:
        S = window_sums(rng.integers(0, U + 1), shape)
    else:
        m, n = rows - shape.height + 1, cols - shape.width + 1
        S = rng.integers(0, shape.height * shape.width * umax + 1, size=(m, n))
    return ReconstructionInstance(shape, S, U)


def check_sat2(rng, count):
    for _ in range(count):
        f = random_2cnf(rng)
        res = sat2.solve_2sat(f)
        if res.satisfiable != truth_table_sat(f):
            return False
        if res.satisfiable and not f.evaluate(res.values):
            return False
    return True


def check_diffcon(rng, count):
    for _ in range(count):
        sys = random_diff_system(rng)
        res = diffcon.solve_diff(sys)
        if isinstance(res, diffcon.Feasible) != box_feasible(sys):
            return False
        if not diffcon.check_certificate(sys, res):
            return False
    return True


def _agrees(inst, result):
    truth = oracle.brute_solve(inst)
    if (result is None) != (truth is None):
        return False
    return result is None or bool(verify_solution(result, inst))


def check_binary(rng, count):
    for t in range(count):
        size = int(rng.integers(2, 5))
        inst = random_instance(rng, size, size, 1, feasible=t % 2 == 0)
        if not _agrees(inst, solver22.solve_binary(inst.sums, inst.upper)):
            return False
    return True


def check_bounded(rng, count):
    for t in range(count):
        inst = random_instance(rng, 4, 4, 3, feasible=t % 2 == 0)
        if not _agrees(inst, solver22.solve_bounded(inst.sums, inst.upper)):
            return False
    return True


def check_noenum(rng, count):
    for t in range(count):
        m, n = (int(v) for v in rng.integers(2, 7, size=2))
        inst = random_instance(rng, m, n, 4, feasible=t % 2 == 0)
        a = solver22.solve_bounded(inst.sums, inst.upper)
        b = solver22.solve_bounded_noenum(inst.sums, inst.upper)
        if (a is None) != (b is None):
            return False
        if b is not None and not verify_solution(b, inst):
            return False
    return True


def check_zero_sum(rng, count):
    prog = coloring.reduce_3col(coloring.Graph.complete(3))[1].program
    slots = prog.layout_slots()
    for _ in range(count):
        values = {r: int(v) for r, v in zip(slots, rng.integers(-9, 10, size=len(slots)))}
        a = gadget23.layout_matrix(prog, values)
        if window_sums(a, gadget23.WINDOW).any():
            return False
    return True


def check_reduction(rng, count):
    graphs = [coloring.Graph.complete(3), coloring.Graph.cycle(5), coloring.Graph.petersen()][:count]
    for g in graphs:
        col = coloring.brute_force_3col(g)
        inst, record = coloring.reduce_3col(g)
        x = coloring.witness_for_coloring(record, col)
        if not verify_solution(x, inst) or coloring.decode_coloring(x, record) != col:
            return False
    return True


CHECKS = {
    "2-SAT vs truth table": (check_sat2, 100, 1000),
    "difference constraints vs box search": (check_diffcon, 40, 200),
    "binary 2x2 vs oracle": (check_binary, 60, 500),
    "bounded 2x2 vs oracle": (check_bounded, 40, 200),
    "enumeration-free vs bounded": (check_noenum, 60, 500),
    "2x3 gadget zero-sum identity": (check_zero_sum, 20, 100),
    "3-coloring reduction witnesses": (check_reduction, 1, 3),
}


def run(level: str = "quick", seed: int = 0, out=print) -> bool:
    ok = True
    for name, (fn, quick, full) in CHECKS.items():
        rng = np.random.default_rng(seed)
        passed = fn(rng, quick if level == "quick" else full)
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
