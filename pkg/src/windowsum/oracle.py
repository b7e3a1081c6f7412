"""Exhaustive search for small instances of any window shape.

Cells are filled in row-major order.  A cell that is the bottom-right corner of
a window closes that window, so its value is forced by the window sum; every
other cell ranges over ``[lower, upper]``.  Deliberately simple: this is the
ground truth the polynomial solvers are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .matrix import ReconstructionInstance

DEFAULT_MAX_NODES = 10**7


class BudgetExhausted(RuntimeError):
    """The node budget ran out before the search finished."""

    def __init__(self, nodes: int):
        super().__init__(f"search budget of {nodes} nodes exhausted")
        self.nodes = nodes


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = DEFAULT_MAX_NODES

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")


def _search(inst: ReconstructionInstance, budget: SearchBudget, limit: int) -> list[np.ndarray]:
    m, n = inst.rows, inst.cols
    h, w = inst.shape.height, inst.shape.width
    lower = inst.lower_or_zero().tolist()
    upper = inst.upper.tolist()
    sums = inst.sums.tolist()
    total = m * n
    a = [[0] * n for _ in range(m)]
    nxt: list[Optional[int]] = [None] * total
    last = [0] * total
    found = []
    nodes = 0
    k = 0
    while k >= 0:
        if k == total:
            found.append(np.array(a, dtype=np.int64).reshape(m, n))
            if len(found) >= limit:
                break
            k -= 1
            continue
        i, j = divmod(k, n)
        if nxt[k] is None:
            lo, hi = lower[i][j], upper[i][j]
            if i >= h - 1 and j >= w - 1:
                r, c = i - h + 1, j - w + 1
                partial = sum(sum(row[c:j + 1]) for row in a[r:i]) + sum(a[i][c:j])
                forced = sums[r][c] - partial
                lo, hi = (forced, forced) if lo <= forced <= hi else (1, 0)
            nxt[k], last[k] = lo, hi
        if nxt[k] > last[k]:
            nxt[k] = None
            k -= 1
            continue
        a[i][j] = nxt[k]
        nxt[k] += 1
        nodes += 1
        if nodes > budget.max_nodes:
            raise BudgetExhausted(budget.max_nodes)
        k += 1
    return found


def brute_solve(inst: ReconstructionInstance, budget: SearchBudget = SearchBudget()) -> Optional[np.ndarray]:
    """First solution in row-major search order, or None when none exists.

    Raises :class:`BudgetExhausted` rather than guessing when the search is cut short.
    """
    found = _search(inst, budget, 1)
    return found[0] if found else None


def brute_enumerate(
    inst: ReconstructionInstance, budget: SearchBudget = SearchBudget(), limit: int = 10**6
) -> list[np.ndarray]:
    return _search(inst, budget, limit)
