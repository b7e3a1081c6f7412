import time

import numpy as np
import pytest

from windowsum.sat2 import Literal, TwoCnf, implication_graph, solve_2sat, solve_2sat_arrays
from windowsum.selftest import random_2cnf, truth_table_sat

z1, z2 = Literal(0), Literal(1)


def reaches(indptr, indices, src, dst):
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        if u == dst:
            return True
        for v in indices[indptr[u]:indptr[u + 1]].tolist():
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def test_simple_sat():
    f = TwoCnf(2, [(z1, z2), (~z1, z2)])
    res = solve_2sat(f)
    assert res.satisfiable and f.evaluate(res.values)


def test_forced_both_ways():
    f = TwoCnf(1, [(z1, z1), (~z1, ~z1)])
    res = solve_2sat(f)
    assert not res.satisfiable and res.conflict == 0


def test_empty_formula():
    assert solve_2sat(TwoCnf(3, [])).values == [False, False, False]
    assert solve_2sat(TwoCnf(0, [])).satisfiable


def test_literal_out_of_range():
    with pytest.raises(ValueError):
        TwoCnf(1, [(Literal(1), z1)])


def test_against_truth_table():
    rng = np.random.default_rng(11)
    sat = unsat = 0
    for _ in range(400):
        f = random_2cnf(rng)
        res = solve_2sat(f)
        assert res.satisfiable == truth_table_sat(f)
        if res.satisfiable:
            sat += 1
            assert f.evaluate(res.values)
        else:
            unsat += 1
    assert sat > 50 and unsat > 50


def test_unsat_certificate_is_a_cycle_through_both_literals():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(300):
        f = random_2cnf(rng)
        res = solve_2sat(f)
        if res.satisfiable:
            continue
        a = np.array([x.vertex for x, _ in f.clauses])
        b = np.array([y.vertex for _, y in f.clauses])
        indptr, indices = implication_graph(f.num_vars, a, b)
        v = res.conflict
        assert reaches(indptr, indices, 2 * v, 2 * v + 1)
        assert reaches(indptr, indices, 2 * v + 1, 2 * v)
        checked += 1
    assert checked > 20


def test_deep_chain_does_not_recurse():
    # implication chain z0 -> z1 -> ... -> z_{n-1} plus forcing z0 true
    n = 200_000
    a = np.concatenate(([0], 2 * np.arange(n - 1) + 1))
    b = np.concatenate(([0], 2 * np.arange(1, n)))
    res = solve_2sat_arrays(n, a, b)
    assert res.satisfiable and all(res.values)


def _banded_formula(rng, n):
    """2n clauses whose two variables are at most 8 apart (cache-friendly, fixed density)."""
    v = rng.integers(0, n, 2 * n)
    w = np.clip(v + rng.integers(-8, 9, 2 * n), 0, n - 1)
    return 2 * v + rng.integers(0, 2, 2 * n), 2 * w + rng.integers(0, 2, 2 * n)


def test_scaling_smoke():
    rng = np.random.default_rng(0)
    solve_2sat_arrays(10, *_banded_formula(rng, 10))  # warm the compiled kernels

    def timed(n):
        arrays = _banded_formula(rng, n)
        best = float("inf")
        for _ in range(3):
            t = time.perf_counter()
            solve_2sat_arrays(n, *arrays)
            best = min(best, time.perf_counter() - t)
        return best

    small, large = timed(250_000), timed(500_000)
    print(f"2-SAT 250k vars: {small:.3f}s, 500k vars: {large:.3f}s, ratio {large / small:.2f}")
    assert large <= 2.5 * small
