"""Linear-time 2-SAT via the implication graph and strongly connected components.

Literal ``(var, negated)`` is vertex ``2 * var + negated`` of the implication
graph, so the complement of vertex ``u`` is ``u ^ 1``.  A clause ``a or b``
contributes the arcs ``~a -> b`` and ``~b -> a``.

Components are found with an iterative Tarjan search (explicit stack, so deep
graphs cannot exhaust the interpreter stack).  Tarjan closes components in
reverse topological order; a variable is set false when the component of its
positive literal comes first topologically, i.e. closes later.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numba
import numpy as np


class Literal(NamedTuple):
    var: int
    negated: bool = False

    def __invert__(self) -> "Literal":
        return Literal(self.var, not self.negated)

    @property
    def vertex(self) -> int:
        return 2 * self.var + int(self.negated)


@dataclass
class TwoCnf:
    num_vars: int
    clauses: list[tuple[Literal, Literal]]

    def __post_init__(self):
        for a, b in self.clauses:
            for lit in (a, b):
                if not 0 <= lit.var < self.num_vars:
                    raise ValueError(f"literal {lit} outside {self.num_vars} variables")

    def evaluate(self, values: Sequence[bool]) -> bool:
        return all(_holds(a, values) or _holds(b, values) for a, b in self.clauses)


def _holds(lit: Literal, values: Sequence[bool]) -> bool:
    return bool(values[lit.var]) != lit.negated


@dataclass
class TwoSatResult:
    satisfiable: bool
    values: Optional[list[bool]] = None
    conflict: Optional[int] = None  # variable whose two literals share a component


@numba.njit(cache=True)
def _tarjan(num_vertices, indptr, indices):
    """Component id per vertex; ids are assigned in order of completion."""
    index = np.full(num_vertices, -1, dtype=np.int64)
    low = np.zeros(num_vertices, dtype=np.int64)
    comp = np.full(num_vertices, -1, dtype=np.int64)
    on_stack = np.zeros(num_vertices, dtype=np.bool_)
    scc_stack = np.empty(num_vertices, dtype=np.int64)
    call_vertex = np.empty(num_vertices, dtype=np.int64)
    call_edge = np.empty(num_vertices, dtype=np.int64)
    counter = 0
    n_comp = 0
    scc_top = 0
    # negative literals are rooted first so unconstrained variables come out false
    for root in range(num_vertices - 1, -1, -1):
        if index[root] != -1:
            continue
        depth = 0
        call_vertex[0] = root
        call_edge[0] = indptr[root]
        index[root] = counter
        low[root] = counter
        counter += 1
        scc_stack[scc_top] = root
        scc_top += 1
        on_stack[root] = True
        while depth >= 0:
            v = call_vertex[depth]
            e = call_edge[depth]
            if e < indptr[v + 1]:
                call_edge[depth] = e + 1
                w = indices[e]
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    scc_stack[scc_top] = w
                    scc_top += 1
                    on_stack[w] = True
                    depth += 1
                    call_vertex[depth] = w
                    call_edge[depth] = indptr[w]
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            if low[v] == index[v]:
                while True:
                    scc_top -= 1
                    w = scc_stack[scc_top]
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
            depth -= 1
            if depth >= 0:
                parent = call_vertex[depth]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return comp


@numba.njit(cache=True)
def _csr(num_vertices, src, dst):
    indptr = np.zeros(num_vertices + 1, dtype=np.int64)
    for u in src:
        indptr[u + 1] += 1
    for v in range(num_vertices):
        indptr[v + 1] += indptr[v]
    fill = indptr[:-1].copy()
    indices = np.empty(len(src), dtype=np.int32)
    for k in range(len(src)):
        indices[fill[src[k]]] = dst[k]
        fill[src[k]] += 1
    return indptr, indices


def implication_graph(num_vars: int, lit_a, lit_b) -> tuple[np.ndarray, np.ndarray]:
    """CSR adjacency (indptr, indices) of the implication graph of clauses ``a or b``."""
    if 2 * num_vars >= 2**31:
        raise ValueError(f"too many variables: {num_vars}")
    # int32 literals halve the memory traffic on large graphs
    lit_a = np.asarray(lit_a, dtype=np.int32)
    lit_b = np.asarray(lit_b, dtype=np.int32)
    src = np.concatenate((lit_a ^ 1, lit_b ^ 1))
    dst = np.concatenate((lit_b, lit_a))
    return _csr(2 * num_vars, src, dst)


def solve_2sat_arrays(num_vars: int, lit_a, lit_b) -> TwoSatResult:
    """Solve clauses given as parallel arrays of literal vertices ``2*var + negated``."""
    if num_vars == 0:
        return TwoSatResult(True, [])
    indptr, indices = implication_graph(num_vars, lit_a, lit_b)
    comp = _tarjan(2 * num_vars, indptr, indices)
    pos, neg = comp[0::2], comp[1::2]
    clash = np.flatnonzero(pos == neg)
    if clash.size:
        return TwoSatResult(False, conflict=int(clash[0]))
    # pos closes before neg  <=>  pos is topologically later  <=>  true
    return TwoSatResult(True, (pos < neg).tolist())


def solve_2sat(f: TwoCnf) -> TwoSatResult:
    lit_a = np.fromiter((a.vertex for a, _ in f.clauses), dtype=np.int64, count=len(f.clauses))
    lit_b = np.fromiter((b.vertex for _, b in f.clauses), dtype=np.int64, count=len(f.clauses))
    return solve_2sat_arrays(f.num_vars, lit_a, lit_b)
