"""Difference-constraint systems ``v[i] - v[j] <= w`` solved by Bellman-Ford.

Each constraint is an arc ``j -> i`` of length ``w``.  The usual auxiliary
source with zero-length arcs to every vertex is not materialized; starting all
distances at 0 is the same thing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass
class DiffSystem:
    num_vars: int
    constraints: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        for c in self.constraints:
            self._check(*c)

    def _check(self, i, j, w):
        if not (0 <= i < self.num_vars and 0 <= j < self.num_vars):
            raise ValueError(f"constraint ({i}, {j}, {w}) references a variable outside 0..{self.num_vars - 1}")
        if i == j and w < 0:
            raise ValueError(f"constraint v[{i}] - v[{i}] <= {w} is trivially infeasible")

    def add(self, i: int, j: int, w: int) -> None:
        """Append ``v[i] - v[j] <= w``."""
        self._check(i, j, w)
        self.constraints.append((i, j, int(w)))

    def add_range(self, i: int, j: int, lo: int, hi: int) -> None:
        """Append ``lo <= v[i] - v[j] <= hi`` as two constraints."""
        self.add(i, j, hi)
        self.add(j, i, -lo)


@dataclass
class Feasible:
    values: list[int]


@dataclass
class Infeasible:
    cycle: list[int]  # constraint indices; each j is the next constraint's i


DiffResult = Union[Feasible, Infeasible]


def solve_diff(sys: DiffSystem) -> DiffResult:
    n = sys.num_vars
    cons = sys.constraints
    dist = [0] * n
    pred: list[Optional[int]] = [None] * n
    if n == 0:
        return Feasible([])
    last = -1
    for _ in range(n):
        last = -1
        for k, (i, j, w) in enumerate(cons):
            cand = dist[j] + w
            if cand < dist[i]:
                dist[i] = cand
                pred[i] = k
                last = i
        if last < 0:
            return Feasible(dist)
    # still relaxing after n rounds: a negative cycle hangs off `last`
    v = last
    for _ in range(n):
        v = cons[pred[v]][1]
    cycle = []
    u = v
    while True:
        k = pred[u]
        cycle.append(k)
        u = cons[k][1]
        if u == v:
            break
    return Infeasible(cycle)


def check_certificate(sys: DiffSystem, result: DiffResult) -> bool:
    """Independently validate either outcome of :func:`solve_diff`."""
    cons = sys.constraints
    if isinstance(result, Feasible):
        vals = result.values
        if len(vals) != sys.num_vars:
            return False
        return all(vals[i] - vals[j] <= w for i, j, w in cons)
    cyc = result.cycle
    if not cyc:
        return False
    for k in cyc:
        if not 0 <= k < len(cons):
            raise IndexError(f"constraint index {k} out of range")
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        if cons[a][1] != cons[b][0]:
            return False
    return sum(cons[k][2] for k in cyc) < 0
