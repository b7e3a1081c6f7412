import itertools

import numpy as np
import pytest

from windowsum.gadget23 import (
    WINDOW,
    GadgetProgram,
    LinearConstraint,
    P,
    VarRef,
    WitnessError,
    X,
    Y,
    Z,
    atomic_holds,
    build_witness_matrix,
    compile_linear,
    constraint_holds,
    decode_values,
    eq_xx,
    eq_xy,
    eq_xz,
    eq_yy,
    eq_yz,
    eq_zz,
    layout_matrix,
    materialize,
)
from windowsum.matrix import lift_solution, shift_two_sided, verify_solution, window_sums
from windowsum.oracle import brute_enumerate


def solutions(prog):
    """Decoded slot values of every solution, found by exhaustive search."""
    inst = materialize(prog)
    shifted, back = shift_two_sided(inst)
    out = []
    for x in brute_enumerate(shifted):
        a = lift_solution(x, back)
        assert verify_solution(a, inst)
        values = decode_values(a, prog)
        assert all(atomic_holds(at, values) for at in prog.atomics)
        out.append(values)
    return out


def project(sols, refs):
    return sorted({tuple(s[r] for r in refs) for s in sols})


def test_eq_xx_forces_equality():
    prog = GadgetProgram.new()
    prog.new_slot("x", 0, 1)
    prog.new_slot("x", 1, 1)
    eq_xx(prog, 1, 2)
    assert project(solutions(prog), [X(1), X(2)]) == [(1, 1)]


def test_eq_xx_self_is_vacuous():
    prog = GadgetProgram.new()
    prog.new_slot("x", 0, 2)
    eq_xx(prog, 1, 1)
    assert project(solutions(prog), [X(1)]) == [(0,), (1,), (2,)]


def test_eq_yy_forces_equality():
    prog = GadgetProgram.new()
    prog.new_slot("y", 0, 1)
    prog.new_slot("y", 0, 0)
    eq_yy(prog, 1, 2)
    assert project(solutions(prog), [Y(1), Y(2)]) == [(0, 0)]


def test_eq_xx_witness():
    prog = GadgetProgram.new()
    prog.new_slot("x", 0, 1)
    prog.new_slot("x", 1, 1)
    eq_xx(prog, 1, 2)
    a = build_witness_matrix(prog, {X(1): 1, X(2): 1})
    assert verify_solution(a, materialize(prog))
    assert decode_values(a, prog)[P(1)] == 1


def _xy_program(x_range, y_range):
    prog = GadgetProgram.new()
    prog.new_slot("x", *x_range)
    prog.new_slot("y", *y_range)
    eq_xy(prog, 1, 1)
    return prog


def test_eq_xy():
    assert project(solutions(_xy_program((0, 1), (1, 1))), [X(1), Y(1)]) == [(1, 1)]
    sols = solutions(_xy_program((0, 0), (0, 0)))
    assert len(sols) == 1 and not any(sols[0].values())
    assert solutions(_xy_program((0, 0), (1, 1))) == []


def test_eq_xy_witness_fills_all_fresh_slots():
    prog = _xy_program((0, 1), (0, 1))
    for v in (0, 1):
        a = build_witness_matrix(prog, {X(1): v, Y(1): v})
        assert verify_solution(a, materialize(prog))


def test_eq_zz():
    prog = GadgetProgram.new()
    prog.new_slot("z", 1, 1)
    prog.new_slot("z", 0, 1)
    eq_zz(prog, 2, 3)
    assert project(solutions(prog), [Z(2), Z(3)]) == [(1, 1)]
    a = build_witness_matrix(prog, {Z(2): 1, Z(3): 1})
    assert verify_solution(a, materialize(prog))


@pytest.mark.parametrize("x_range, z_range, expected", [
    ((0, 0), (0, 0), [(0, 0)]),
    ((0, 1), (1, 1), [(1, 1)]),
    ((0, 1), (0, 1), [(0, 0), (1, 1)]),
    ((1, 1), (0, 0), []),
])
def test_eq_xz(x_range, z_range, expected):
    prog = GadgetProgram.new()
    prog.new_slot("x", *x_range)
    prog.new_slot("z", *z_range)
    eq_xz(prog, 1, 2)
    assert project(solutions(prog), [X(1), Z(2)]) == expected


@pytest.mark.parametrize("v", [0, 1])
def test_eq_yz_propagates(v):
    prog = GadgetProgram.new()
    prog.new_slot("y", v, v)
    prog.new_slot("z", 0, 1)
    eq_yz(prog, 1, 2)
    assert project(solutions(prog), [Y(1), Z(2)]) == [(v, v)]
    a = build_witness_matrix(prog, {Y(1): v, Z(2): v})
    assert verify_solution(a, materialize(prog))


def test_unallocated_slot():
    prog = GadgetProgram.new()
    with pytest.raises(ValueError):
        eq_xx(prog, 1, 2)
    with pytest.raises(ValueError):
        prog.bound(Z(5), 0, 0)


def test_compile_two_terms():
    prog = compile_linear([LinearConstraint((X(1), X(2)), 2, 2)], [(0, 1), (0, 1)])
    assert project(solutions(prog), [X(1), X(2)]) == [(1, 1)]
    prog = compile_linear([LinearConstraint((X(1), X(2)), 3, 3)], [(0, 1), (0, 1)])
    assert solutions(prog) == []


def test_compile_three_terms():
    prog = compile_linear([LinearConstraint((X(1), X(2), X(3)), 1, 1)], [(0, 1)] * 3)
    assert project(solutions(prog), [X(1), X(2), X(3)]) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_compile_duplicated_terms_and_single_term():
    # x1 + x1 in [2, 2] pins x1 = 1; single-term constraint narrows x2
    prog = compile_linear([LinearConstraint((X(1), X(1)), 2, 2), LinearConstraint((X(2),), 1, 2)], [(0, 1), (0, 2)])
    assert project(solutions(prog), [X(1), X(2)]) == [(1, 1), (1, 2)]


def test_compile_rejects_bad_terms():
    with pytest.raises(ValueError):
        LinearConstraint((X(1),) * 4, 0, 1)
    with pytest.raises(ValueError):
        compile_linear([LinearConstraint((X(1), X(3)), 0, 1)], [(0, 1), (0, 1)])


TINY_SYSTEMS = [
    ([LinearConstraint((X(1), X(2)), 1, 1)], [(0, 1), (0, 1)]),
    ([LinearConstraint((X(1), X(2)), 0, 1), LinearConstraint((X(2),), 1, 1)], [(0, 1), (0, 1)]),
    ([LinearConstraint((X(1), X(2), X(2)), 2, 2)], [(0, 2), (0, 1)]),
    ([LinearConstraint((X(1), X(2)), -1, 0)], [(-1, 1), (0, 1)]),
]


@pytest.mark.parametrize("cons, bounds", TINY_SYSTEMS)
def test_soundness_and_completeness_exhaustive(cons, bounds):
    prog = compile_linear(cons, bounds)
    base = [X(v) for v in range(1, len(bounds) + 1)]
    truth = sorted(
        vals for vals in itertools.product(*[range(lo, hi + 1) for lo, hi in bounds])
        if all(constraint_holds(c, dict(zip(base, vals))) for c in cons)
    )
    assert project(solutions(prog), base) == truth
    inst = materialize(prog)
    for vals in truth:
        assert verify_solution(build_witness_matrix(prog, dict(zip(base, vals))), inst)


def test_zero_sum_identity_random_values():
    prog = compile_linear([LinearConstraint((X(1), X(2), X(3)), 1, 1)], [(0, 1)] * 3)
    rng = np.random.default_rng(0)
    slots = prog.layout_slots()
    for _ in range(100):
        values = {r: int(v) for r, v in zip(slots, rng.integers(-50, 51, size=len(slots)))}
        a = layout_matrix(prog, values)
        assert not window_sums(a, WINDOW).any()
        assert decode_values(a, prog) == values


def test_all_zero_witness_verifies():
    prog = compile_linear([LinearConstraint((X(1), X(2)), 0, 1), LinearConstraint((X(1), X(2), X(3)), 0, 2)],
                          [(0, 1)] * 3)
    a = build_witness_matrix(prog, {X(1): 0, X(2): 0, X(3): 0})
    assert not a.any() and verify_solution(a, materialize(prog))


def test_witness_needs_base_values():
    prog = compile_linear([LinearConstraint((X(1), X(2)), 0, 1)], [(0, 1)] * 2)
    with pytest.raises(WitnessError):
        build_witness_matrix(prog, {X(1): 0})


def test_size_bound():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        cons = [LinearConstraint(tuple(X(int(v)) for v in rng.integers(1, n + 1, size=int(rng.integers(1, 4)))), 0, 2)
                for _ in range(int(rng.integers(0, 8)))]
        prog = compile_linear(cons, [(0, 1)] * n)
        assert prog.num_rows <= n + 5 * len(cons)
        assert prog.num_triples <= 1 + 3 * len(cons)


def test_dont_care_margin_and_pinned_header():
    prog = compile_linear([LinearConstraint((X(1), X(2)), 0, 4)], [(0, 2), (-3, 1)])
    inst = materialize(prog)
    assert inst.lower[0, 0] == inst.upper[0, 0] == inst.lower[0, 1] == inst.upper[0, 1] == 0
    assert inst.upper.max() == 3 * 3 + 1 and inst.lower.min() == -(3 * 3 + 1)
    assert not inst.sums.any() and prog.conflicts == []


def test_conflicting_atomics_make_instance_infeasible():
    prog = GadgetProgram.new()
    prog.new_slot("x", 0, 1)
    prog.bound(X(1), 2, 3)
    inst = materialize(prog)
    assert prog.conflicts == [(1, 0)]
    assert brute_enumerate(shift_two_sided(inst)[0]) == []


def test_json_round_trip():
    prog = compile_linear([LinearConstraint((X(1), X(2), X(3)), 1, 1)], [(0, 1)] * 3)
    again = GadgetProgram.from_json(prog.to_json())
    assert again.dumps() == prog.dumps()
    assert (materialize(again).upper == materialize(prog).upper).all()
    assert again.plan == prog.plan and again.zero_z == VarRef("z", 1)
