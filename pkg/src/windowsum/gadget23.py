"""Compiling bounded sums of up to three integer variables into a 2x3 instance.

With all 2x3 window sums zero and ``A[0][0] = A[0][1] = 0``, a matrix with
``R + 1`` rows and ``3C + 2`` columns is fixed by its header row and first two
columns.  Naming the free cells as five slot families gives, for ``i, k >= 1``::

    A[0][3k-1] = z_k     A[0][3k] = p_k     A[0][3k+1] = q_k
    A[i][0]   = (-1)**(i+1) * x_i            A[i][1] = (-1)**(i+1) * y_i
    A[i][3k-1] = (-1)**i     * (x_i + y_i + z_k)
    A[i][3k]   = (-1)**(i+1) * (x_i - p_k)
    A[i][3k+1] = (-1)**(i+1) * (y_i - q_k)

so cell bounds express bounds on slots, on ``x_i - p_k``, ``y_i - q_k`` and
``x_i + y_i + z_k``.  The ``eq_*`` gadgets build slot equalities out of those
forms, which in turn lets :func:`compile_linear` handle arbitrary sums of two
or three variables.

Every fresh slot a gadget allocates gets a witness expression (a copy of
another slot, a constant, or minus a sum of slots), so any assignment of the
base variables extends mechanically to a full matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .matrix import DimensionError, ReconstructionInstance, WindowShape, as_matrix

WINDOW = WindowShape(2, 3)
GROUPS = ("x", "y", "z", "p", "q")


class VarRef(NamedTuple):
    group: str
    index: int

    def __str__(self):
        return f"{self.group}{self.index}"


def X(i):
    return VarRef("x", i)


def Y(i):
    return VarRef("y", i)


def Z(k):
    return VarRef("z", k)


def P(k):
    return VarRef("p", k)


def Q(k):
    return VarRef("q", k)


@dataclass(frozen=True)
class Atomic:
    """``lo <= expr <= hi`` where ``expr`` is one of the four cell forms.

    ``form`` is ``"bound"`` (``refs = (slot,)``), ``"xp"`` for ``x_i - p_k``,
    ``"yq"`` for ``y_i - q_k`` or ``"xyz"`` for ``x_i + y_i + z_k``; the last
    three carry ``refs = (i, k)``.
    """

    form: str
    refs: tuple
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[VarRef, ...]
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= len(self.terms) <= 3:
            raise ValueError(f"constraints take 1 to 3 terms, got {len(self.terms)}")
        if self.lo > self.hi:
            raise ValueError(f"empty range [{self.lo}, {self.hi}]")


class WitnessError(RuntimeError):
    pass


@dataclass
class GadgetProgram:
    counts: dict = field(default_factory=lambda: {g: 0 for g in GROUPS})
    atomics: list[Atomic] = field(default_factory=list)
    # fresh slot -> ("copy", ref) | ("const", c) | ("neg", (refs...)), in emission order
    plan: dict = field(default_factory=dict)
    zero_z: Optional[VarRef] = None
    conflicts: list = field(default_factory=list)

    @classmethod
    def new(cls) -> "GadgetProgram":
        prog = cls()
        prog.zero_z = prog.new_slot("z", 0, 0)
        return prog

    # -- allocation ---------------------------------------------------------
    def new_slot(self, group: str, lo: Optional[int] = None, hi: Optional[int] = None, plan=None) -> VarRef:
        if group not in GROUPS:
            raise ValueError(f"unknown group {group!r}")
        self.counts[group] += 1
        ref = VarRef(group, self.counts[group])
        if lo is not None:
            self.bound(ref, lo, lo if hi is None else hi)
        if plan is not None:
            self.plan[ref] = plan
        return ref

    def new_row(self, x_plan, y_plan) -> int:
        """Fresh index ``i`` with both ``x_i`` and ``y_i`` unused."""
        i = max(self.counts["x"], self.counts["y"]) + 1
        self.counts["x"] = self.counts["y"] = i
        self.plan[X(i)] = x_plan
        self.plan[Y(i)] = y_plan
        return i

    def check(self, ref: VarRef) -> VarRef:
        ref = VarRef(*ref)
        if ref.group not in GROUPS or not 1 <= ref.index <= self.counts[ref.group]:
            raise ValueError(f"slot {ref} is not allocated")
        return ref

    # -- atomic constraints -------------------------------------------------
    def bound(self, ref: VarRef, lo: int, hi: int) -> None:
        self.atomics.append(Atomic("bound", (self.check(ref),), int(lo), int(hi)))

    def xp(self, i: int, k: int, lo: int, hi: int) -> None:
        self.check(X(i)), self.check(P(k))
        self.atomics.append(Atomic("xp", (i, k), int(lo), int(hi)))

    def yq(self, i: int, k: int, lo: int, hi: int) -> None:
        self.check(Y(i)), self.check(Q(k))
        self.atomics.append(Atomic("yq", (i, k), int(lo), int(hi)))

    def xyz(self, i: int, k: int, lo: int, hi: int) -> None:
        self.check(X(i)), self.check(Y(i)), self.check(Z(k))
        self.atomics.append(Atomic("xyz", (i, k), int(lo), int(hi)))

    # -- layout -------------------------------------------------------------
    @property
    def num_rows(self) -> int:
        return max(self.counts["x"], self.counts["y"])

    @property
    def num_triples(self) -> int:
        return max(self.counts["z"], self.counts["p"], self.counts["q"], 1)

    @property
    def dims(self) -> tuple[int, int]:
        return self.num_rows + 1, 3 * self.num_triples + 2

    def layout_slots(self) -> list[VarRef]:
        nr, nc = self.num_rows, self.num_triples
        return [VarRef(g, i) for g in "xy" for i in range(1, nr + 1)] + [
            VarRef(g, k) for g in "zpq" for k in range(1, nc + 1)
        ]

    def referenced(self) -> set:
        refs = set()
        for a in self.atomics:
            if a.form == "bound":
                refs.add(a.refs[0])
            else:
                i, k = a.refs
                refs.update({"xp": (X(i), P(k)), "yq": (Y(i), Q(k)), "xyz": (X(i), Y(i), Z(k))}[a.form])
        return refs

    def slot_bounds(self) -> dict:
        """Final range of every layout slot.

        Explicit bounds are intersected with the range implied by the witness
        plan; slots no atomic mentions are pinned to 0.
        """
        explicit = {}
        for a in self.atomics:
            if a.form == "bound":
                ref = a.refs[0]
                lo, hi = explicit.get(ref, (a.lo, a.hi))
                explicit[ref] = (max(lo, a.lo), min(hi, a.hi))
        implied = {}
        for ref, (kind, arg) in self.plan.items():
            if kind == "const":
                implied[ref] = (arg, arg)
                continue
            srcs = [arg] if kind == "copy" else list(arg)
            rng = [implied.get(s, explicit.get(s)) for s in srcs]
            if any(r is None for r in rng):
                continue
            if kind == "copy":
                implied[ref] = rng[0]
            else:
                implied[ref] = (-sum(r[1] for r in rng), -sum(r[0] for r in rng))
            if ref in explicit:
                lo, hi = explicit[ref]
                implied[ref] = (max(lo, implied[ref][0]), min(hi, implied[ref][1]))
        used = self.referenced()
        out = {}
        for ref in self.layout_slots():
            if ref in implied:
                out[ref] = implied[ref]
            elif ref in explicit:
                out[ref] = explicit[ref]
            elif ref in used:
                raise ValueError(f"slot {ref} is constrained but has no bound")
            else:
                out[ref] = (0, 0)
        return out

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        def plan_arg(kind, arg):
            if kind == "copy":
                return list(arg)
            if kind == "neg":
                return [list(r) for r in arg]
            return arg

        return {
            "counts": dict(self.counts),
            "zero_z": list(self.zero_z) if self.zero_z else None,
            "atomics": [
                {"form": a.form, "refs": [list(r) if isinstance(r, tuple) else r for r in a.refs], "lo": a.lo, "hi": a.hi}
                for a in self.atomics
            ],
            "plan": [{"slot": list(ref), "kind": kind, "arg": plan_arg(kind, arg)} for ref, (kind, arg) in self.plan.items()],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GadgetProgram":
        prog = cls(counts={g: int(doc["counts"].get(g, 0)) for g in GROUPS})
        prog.zero_z = VarRef(*doc["zero_z"]) if doc.get("zero_z") else None
        for a in doc["atomics"]:
            refs = (VarRef(*a["refs"][0]),) if a["form"] == "bound" else tuple(int(r) for r in a["refs"])
            prog.atomics.append(Atomic(a["form"], refs, int(a["lo"]), int(a["hi"])))
        for entry in doc["plan"]:
            kind, arg = entry["kind"], entry["arg"]
            if kind == "copy":
                arg = VarRef(*arg)
            elif kind == "neg":
                arg = tuple(VarRef(*r) for r in arg)
            prog.plan[VarRef(*entry["slot"])] = (kind, arg)
        return prog

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# --- equation gadgets ---------------------------------------------------------

def eq_xx(prog: GadgetProgram, a: int, b: int) -> None:
    """``x_a = x_b`` through a fresh ``p``."""
    prog.check(X(a)), prog.check(X(b))
    k = prog.new_slot("p", plan=("copy", X(a))).index
    prog.xp(a, k, 0, 0)
    prog.xp(b, k, 0, 0)


def eq_yy(prog: GadgetProgram, a: int, b: int) -> None:
    """``y_a = y_b`` through a fresh ``q``."""
    prog.check(Y(a)), prog.check(Y(b))
    k = prog.new_slot("q", plan=("copy", Y(a))).index
    prog.yq(a, k, 0, 0)
    prog.yq(b, k, 0, 0)


def eq_xy(prog: GadgetProgram, a: int, b: int) -> None:
    """``x_a = y_b``: both are tied to ``-z_j`` for one fresh ``z_j``."""
    prog.check(X(a)), prog.check(Y(b))
    i = prog.new_row(("copy", X(a)), ("const", 0))
    j = prog.new_slot("z", plan=("neg", (X(i), Y(i)))).index
    eq_xx(prog, a, i)
    prog.bound(Y(i), 0, 0)
    prog.xyz(i, j, 0, 0)
    k = prog.new_row(("const", 0), ("copy", Y(b)))
    eq_yy(prog, b, k)
    prog.bound(X(k), 0, 0)
    prog.xyz(k, j, 0, 0)


def eq_zz(prog: GadgetProgram, a: int, b: int) -> None:
    """``z_a = z_b`` via ``y_i = -z_a``, ``x_j = -z_b`` and ``y_i = x_j``."""
    prog.check(Z(a)), prog.check(Z(b))
    i = prog.new_row(("const", 0), ("neg", (Z(a),)))
    j = prog.new_row(("neg", (Z(b),)), ("const", 0))
    prog.bound(X(i), 0, 0)
    prog.xyz(i, a, 0, 0)
    prog.bound(Y(j), 0, 0)
    prog.xyz(j, b, 0, 0)
    eq_xy(prog, j, i)


def eq_xz(prog: GadgetProgram, a: int, b: int) -> None:
    """``x_a = z_b``; uses the program's shared zero ``z`` slot."""
    prog.check(X(a)), prog.check(Z(b))
    i = prog.new_row(("copy", X(a)), ("neg", (X(a),)))
    j = prog.new_row(("const", 0), ("neg", (Z(b),)))
    eq_xx(prog, i, a)
    prog.bound(X(j), 0, 0)
    prog.xyz(j, b, 0, 0)
    eq_yy(prog, i, j)
    prog.xyz(i, prog.zero_z.index, 0, 0)


def eq_yz(prog: GadgetProgram, a: int, b: int) -> None:
    """``y_a = z_b`` composed as ``y_a = x_t = z_b`` for a fresh ``x_t``."""
    prog.check(Y(a)), prog.check(Z(b))
    t = prog.new_slot("x", plan=("copy", Y(a))).index
    eq_xy(prog, t, a)
    eq_xz(prog, t, b)


def copy_into(prog: GadgetProgram, target: VarRef, source: VarRef) -> None:
    """Emit the gadget forcing ``target = source`` for any pair of x/y/z slots."""
    tg, sg = target.group, source.group
    t, s = target.index, source.index
    table = {
        ("x", "x"): lambda: eq_xx(prog, s, t),
        ("x", "y"): lambda: eq_xy(prog, t, s),
        ("x", "z"): lambda: eq_xz(prog, t, s),
        ("y", "x"): lambda: eq_xy(prog, s, t),
        ("y", "y"): lambda: eq_yy(prog, s, t),
        ("y", "z"): lambda: eq_yz(prog, t, s),
        ("z", "x"): lambda: eq_xz(prog, s, t),
        ("z", "y"): lambda: eq_yz(prog, s, t),
        ("z", "z"): lambda: eq_zz(prog, s, t),
    }
    if (tg, sg) not in table:
        raise ValueError(f"cannot copy {source} into {target}")
    table[tg, sg]()


def compile_linear(constraints: Iterable[LinearConstraint], base_bounds: Sequence[tuple[int, int]]) -> GadgetProgram:
    """Program whose solutions are the assignments satisfying every constraint.

    Base variable ``v`` (1-based) lives in slot ``x_v`` with range ``base_bounds[v-1]``.
    """
    prog = GadgetProgram.new()
    for lo, hi in base_bounds:
        prog.new_slot("x", lo, hi)
    base = set(VarRef("x", v) for v in range(1, len(base_bounds) + 1))
    for con in constraints:
        terms = [VarRef(*t) for t in con.terms]
        for t in terms:
            if t not in base:
                raise ValueError(f"term {t} is not a base variable")
        if len(terms) == 1:
            prog.bound(terms[0], con.lo, con.hi)
            continue
        i = prog.new_row(("copy", terms[0]), ("copy", terms[1]))
        copy_into(prog, X(i), terms[0])
        copy_into(prog, Y(i), terms[1])
        if len(terms) == 2:
            k = prog.zero_z.index
        else:
            k = prog.new_slot("z", plan=("copy", terms[2])).index
            copy_into(prog, Z(k), terms[2])
        prog.xyz(i, k, con.lo, con.hi)
    return prog


# --- materialization ------------------------------------------------------------

def _sign(i: int) -> int:
    return 1 if i % 2 == 0 else -1


def slot_cell(ref: VarRef) -> tuple[int, int, int]:
    """(row, col, sign) with ``A[row][col] = sign * value(ref)``."""
    g, i = ref
    if g == "x":
        return i, 0, -_sign(i)
    if g == "y":
        return i, 1, -_sign(i)
    return 0, 3 * i - 1 + "zpq".index(g), 1


def atomic_cell(a: Atomic) -> tuple[int, int, int]:
    if a.form == "bound":
        return slot_cell(a.refs[0])
    i, k = a.refs
    if a.form == "xyz":
        return i, 3 * k - 1, _sign(i)
    return i, 3 * k + (0 if a.form == "xp" else 1), -_sign(i)


def materialize(prog: GadgetProgram) -> ReconstructionInstance:
    """Two-sided 2x3 instance whose solutions correspond to the program's.

    Conflicting constraints on one cell are intersected.  An empty intersection
    is recorded in ``prog.conflicts`` and the emitted instance is made
    unsatisfiable by giving one window covering that cell an unreachable sum.
    """
    bounds = prog.slot_bounds()
    v = max([1] + [max(abs(lo), abs(hi)) for lo, hi in bounds.values()])
    big = 3 * v + 1
    rows, cols = prog.dims
    lo = np.full((rows, cols), -big, dtype=np.int64)
    hi = np.full((rows, cols), big, dtype=np.int64)
    lo[0, :2] = hi[0, :2] = 0
    ranges = {}
    for ref, (a, b) in bounds.items():
        ranges[slot_cell(ref)[:2]] = (a, b, slot_cell(ref)[2])
    for at in prog.atomics:
        if at.form == "bound":
            continue
        r, c, s = atomic_cell(at)
        a, b, _ = ranges.get((r, c), (at.lo, at.hi, s))
        ranges[r, c] = (max(a, at.lo), min(b, at.hi), s)
    prog.conflicts = []
    for (r, c), (a, b, s) in ranges.items():
        if a > b:
            prog.conflicts.append((r, c))
            a = b
        lo[r, c], hi[r, c] = (a, b) if s > 0 else (-b, -a)
    sums = np.zeros((rows - 1, cols - 2), dtype=np.int64)
    for r, c in prog.conflicts:
        wr, wc = min(r, rows - 2), min(c, cols - 3)
        sums[wr, wc] = hi[wr:wr + 2, wc:wc + 3].sum() + 1
    return ReconstructionInstance(WINDOW, sums, hi, lo)


def layout_matrix(prog: GadgetProgram, values: dict) -> np.ndarray:
    """Evaluate the cell identities for a slot assignment (missing slots are 0)."""
    nr, nc = prog.num_rows, prog.num_triples

    def vec(g, count):
        return np.array([values.get(VarRef(g, i), 0) for i in range(1, count + 1)], dtype=np.int64)

    x, y = vec("x", nr), vec("y", nr)
    z, p, q = vec("z", nc), vec("p", nc), vec("q", nc)
    sign = -np.array([_sign(i) for i in range(1, nr + 1)], dtype=np.int64)  # (-1)^(i+1)
    a = np.zeros(prog.dims, dtype=np.int64)
    a[0, 2::3], a[0, 3::3], a[0, 4::3] = z, p, q
    a[1:, 0] = sign * x
    a[1:, 1] = sign * y
    s = sign[:, None]
    a[1:, 2::3] = -s * (x[:, None] + y[:, None] + z[None, :])
    a[1:, 3::3] = s * (x[:, None] - p[None, :])
    a[1:, 4::3] = s * (y[:, None] - q[None, :])
    return a


def extend_witness(prog: GadgetProgram, base_values: dict) -> dict:
    """Fill every fresh slot from its witness expression."""
    values = {VarRef(*k): int(v) for k, v in base_values.items()}
    for ref, (kind, arg) in prog.plan.items():
        if ref in values:
            continue
        try:
            if kind == "const":
                values[ref] = arg
            elif kind == "copy":
                values[ref] = values[arg]
            else:
                values[ref] = -sum(values[r] for r in arg)
        except KeyError as exc:
            raise WitnessError(f"witness for {ref} needs {exc.args[0]}, which has no value yet") from None
    used = prog.referenced()
    for ref in prog.layout_slots():
        if ref not in values and ref in used and ref != prog.zero_z:
            raise WitnessError(f"slot {ref} has neither a base value nor a witness expression")
    return values


def build_witness_matrix(prog: GadgetProgram, base_values: dict) -> np.ndarray:
    return layout_matrix(prog, extend_witness(prog, base_values))


def decode_values(a, prog: GadgetProgram) -> dict:
    """Read every layout slot back out of a matrix."""
    a = as_matrix(a, "A")
    if a.shape != prog.dims:
        raise DimensionError(f"matrix has shape {a.shape}, program layout is {prog.dims}")
    out = {}
    for ref in prog.layout_slots():
        r, c, s = slot_cell(ref)
        out[ref] = s * int(a[r, c])
    return out


def atomic_holds(at: Atomic, values: dict) -> bool:
    if at.form == "bound":
        v = values[at.refs[0]]
    else:
        i, k = at.refs
        if at.form == "xp":
            v = values[X(i)] - values[P(k)]
        elif at.form == "yq":
            v = values[Y(i)] - values[Q(k)]
        else:
            v = values[X(i)] + values[Y(i)] + values[Z(k)]
    return at.lo <= v <= at.hi


def constraint_holds(con: LinearConstraint, values: dict) -> bool:
    return con.lo <= sum(values[VarRef(*t)] for t in con.terms) <= con.hi
