"""Graph 3-coloring as a 2x3 window-sum instance.

Each vertex ``v`` gets three 0/1 variables, one per color, summing to 1; each
edge forbids both endpoints taking the same color.  The resulting bounded sums
go through :func:`windowsum.gadget23.compile_linear` and become an
upper-bounded instance after shifting out the lower bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .gadget23 import GadgetProgram, LinearConstraint, VarRef, build_witness_matrix, compile_linear, decode_values, materialize
from .matrix import BackShift, ReconstructionInstance, lift_solution, shift_two_sided, verify_solution

MAX_BRUTE_VERTICES = 16


class GadgetError(RuntimeError):
    """A decoded assignment broke an invariant the gadgets are supposed to enforce."""


@dataclass
class Graph:
    n: int
    edges: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            seen.add((min(u, v), max(u, v)))
        self.edges = sorted(seen)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, list(combinations(range(n), 2)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def petersen(cls) -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return cls(10, outer + spokes + inner)


def parse_graph(text: str) -> Graph:
    """JSON ``{"n": .., "edges": [[u, v], ...]}`` (0-based) or DIMACS ``p edge`` / ``e u v`` (1-based)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        try:
            return Graph(int(doc["n"]), [(int(u), int(v)) for u, v in doc["edges"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed graph document: {exc}") from None
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) < 3 or parts[1] not in ("edge", "col"):
                raise ValueError(f"line {lineno}: expected 'p edge <n> <m>'")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None:
                raise ValueError(f"line {lineno}: edge before 'p' header")
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise ValueError(f"line {lineno}: unrecognized line {line!r}")
    if n is None:
        raise ValueError("missing 'p edge' header")
    return Graph(n, edges)


def graph_to_json(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges]}


@dataclass
class IpSystem:
    triples: list[tuple[VarRef, VarRef, VarRef]]
    constraints: list[LinearConstraint]
    bounds: list[tuple[int, int]]

    def satisfied_by(self, values: dict) -> bool:
        for ref, (lo, hi) in zip((VarRef("x", v) for v in range(1, len(self.bounds) + 1)), self.bounds):
            if not lo <= values[ref] <= hi:
                return False
        return all(c.lo <= sum(values[t] for t in c.terms) <= c.hi for c in self.constraints)


def encode_3col(g: Graph) -> IpSystem:
    triples = [tuple(VarRef("x", 3 * v + c + 1) for c in range(3)) for v in range(g.n)]
    cons = [LinearConstraint(t, 1, 1) for t in triples]
    for u, v in g.edges:
        for c in range(3):
            cons.append(LinearConstraint((triples[u][c], triples[v][c]), 0, 1))
    return IpSystem(triples, cons, [(0, 1)] * (3 * g.n))


@dataclass
class ReductionRecord:
    program: GadgetProgram
    triples: list[tuple[VarRef, VarRef, VarRef]]
    back: BackShift

    def to_json(self) -> dict:
        return {
            "program": self.program.to_json(),
            "triples": [[list(r) for r in t] for t in self.triples],
            "L": self.back.lower.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ReductionRecord":
        try:
            prog = GadgetProgram.from_json(doc["program"])
            triples = [tuple(VarRef(*r) for r in t) for t in doc["triples"]]
            return cls(prog, triples, BackShift(np.array(doc["L"], dtype=np.int64)))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed reduction record: {exc}") from None


def reduce_3col(g: Graph) -> tuple[ReconstructionInstance, ReductionRecord]:
    ip = encode_3col(g)
    prog = compile_linear(ip.constraints, ip.bounds)
    inst, back = shift_two_sided(materialize(prog))
    return inst, ReductionRecord(prog, ip.triples, back)


def reduced_instance(record: ReductionRecord) -> ReconstructionInstance:
    inst, _ = shift_two_sided(materialize(record.program))
    return inst


def witness_for_coloring(record: ReductionRecord, coloring) -> np.ndarray:
    """Solution of the reduced (upper-bounded) instance built from a coloring."""
    base = {}
    for triple, color in zip(record.triples, coloring):
        for c, ref in enumerate(triple):
            base[ref] = int(c == color)
    return build_witness_matrix(record.program, base) - record.back.lower


def decode_coloring(x, record: ReductionRecord) -> list[int]:
    inst = reduced_instance(record)
    verdict = verify_solution(x, inst)
    if not verdict:
        raise ValueError(f"not a solution of the reduced instance: {verdict.reason}")
    values = decode_values(lift_solution(x, record.back), record.program)
    colors = []
    for v, triple in enumerate(record.triples):
        bits = [values[r] for r in triple]
        if sorted(bits) != [0, 0, 1]:
            raise GadgetError(f"vertex {v} decoded to color indicators {bits}")
        colors.append(bits.index(1))
    return colors


def verify_coloring(g: Graph, coloring) -> bool:
    if len(coloring) != g.n or any(c not in (0, 1, 2) for c in coloring):
        return False
    return all(coloring[u] != coloring[v] for u, v in g.edges)


def brute_force_3col(g: Graph) -> Optional[list[int]]:
    """Exhaustive search in vertex order; only prefixes already violating an edge are cut."""
    if g.n > MAX_BRUTE_VERTICES:
        raise ValueError(f"brute force limited to {MAX_BRUTE_VERTICES} vertices, got {g.n}")
    earlier = [[] for _ in range(g.n)]
    for u, v in g.edges:
        earlier[max(u, v)].append(min(u, v))
    colors = [0] * g.n

    def place(v):
        if v == g.n:
            return True
        for c in range(3):
            if all(colors[u] != c for u in earlier[v]):
                colors[v] = c
                if place(v + 1):
                    return True
        return False

    return list(colors) if place(0) else None
