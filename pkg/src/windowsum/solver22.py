"""Reconstruction from 2x2 window sums.

Once the corner ``a00`` is fixed, every cell is determined by the rest of row 0
(``x_1..x_{n-1}``) and column 0 (``y_1..y_{m-1}``)::

    A[i][j] = (-1)**i * x[j] + (-1)**j * y[i] + b[i][j]      (x[0] = y[0] = 0)

so the bounds on ``A`` become constraints on pairs ``(x_j, y_i)``.  With 0/1
cells these are 2-CNF clauses; with general bounds, substituting
``x_j = (-1)**j * alpha_j`` and ``y_i = (-1)**(i+1) * beta_i`` turns them into
bounds on ``alpha_j``, ``beta_i`` and ``alpha_j - beta_i``, i.e. a
difference-constraint system once the absolute bounds are taken relative to a
shared slack variable ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .diffcon import DiffSystem, Feasible, solve_diff
from .matrix import (
    DimensionError,
    ReconstructionInstance,
    WindowShape,
    as_matrix,
    reflect_instance,
    unreflect,
)
from .sat2 import solve_2sat_arrays

WINDOW = WindowShape(2, 2)


@dataclass
class BorderAssignment:
    a00: int
    x: np.ndarray  # x_1..x_{n-1}
    y: np.ndarray  # y_1..y_{m-1}


def _signs(k: int) -> np.ndarray:
    return np.where(np.arange(k) % 2 == 0, 1, -1).astype(np.int64)


def offset_parts(S, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Split the offsets as ``b = c + a00 * e``; returns ``(c, e)``.

    ``c`` follows the window recurrence from an all-zero border, ``e`` from a
    border that is zero except for a 1 at the corner.  Closed forms:
    ``c[i][j] = (-1)**(i+j) * sum_{k<i, l<j} (-1)**(k+l) * S[k][l]`` and
    ``e[i][j] = -(-1)**(i+j)`` for ``i, j >= 1``.
    """
    S = as_matrix(S, "S")
    if m < 1 or n < 1 or S.shape != (m - 1, n - 1):
        raise DimensionError(f"S has shape {S.shape}, expected {(m - 1, n - 1)}")
    checker = np.outer(_signs(m), _signs(n))
    c = np.zeros((m, n), dtype=np.int64)
    inner = c[1:, 1:]
    np.multiply(S, checker[:-1, :-1], out=inner)
    np.cumsum(inner, axis=0, out=inner)
    np.cumsum(inner, axis=1, out=inner)
    inner *= checker[1:, 1:]
    e = -checker
    e[0, :] = 0
    e[:, 0] = 0
    e[0, 0] = 1
    return c, e


def compute_offsets(S, m: int, n: int, a00: int) -> np.ndarray:
    c, e = offset_parts(S, m, n)
    return c + a00 * e


def assemble(offsets: np.ndarray, border: BorderAssignment) -> np.ndarray:
    m, n = offsets.shape
    if len(border.x) != n - 1 or len(border.y) != m - 1:
        raise DimensionError("border lengths do not match the offsets")
    x = np.zeros(n, dtype=np.int64)
    y = np.zeros(m, dtype=np.int64)
    x[1:] = border.x
    y[1:] = border.y
    if border.a00 != offsets[0, 0]:
        raise ValueError(f"border corner {border.a00} != offset corner {offsets[0, 0]}")
    return np.outer(_signs(m), x) + np.outer(y, _signs(n)) + offsets


def _check_dims(S, U) -> tuple[np.ndarray, np.ndarray]:
    S = as_matrix(S, "S")
    U = as_matrix(U, "U")
    m, n = U.shape
    if m < 2 or n < 2:
        raise DimensionError(f"2x2 solvers need at least a 2x2 matrix, got {m}x{n}")
    if S.shape != (m - 1, n - 1):
        raise DimensionError(f"S has shape {S.shape}, expected {(m - 1, n - 1)}")
    return S, U


# --- binary cells: 2-SAT -------------------------------------------------------

@njit(cache=True)
def _forbidden_pairs(b, U, lit_a, lit_b):
    """Write one clause per forbidden ``(x_j, y_i)`` pair; return the count, or -1
    if some interior cell admits no pair at all."""
    m, n = U.shape
    nx = n - 1
    k = 0
    for i in range(1, m):
        si = 1 if i % 2 == 0 else -1
        for j in range(1, n):
            sj = 1 if j % 2 == 0 else -1
            lo = -b[i, j]
            hi = U[i, j] - b[i, j]
            allowed = 0
            for xa in range(2):
                for yc in range(2):
                    v = si * xa + sj * yc
                    if lo <= v <= hi:
                        allowed += 1
                    else:
                        # forbid (x_j = xa and y_i = yc): clause (x_j != xa) or (y_i != yc)
                        lit_a[k] = 2 * (j - 1) + xa
                        lit_b[k] = 2 * (nx + i - 1) + yc
                        k += 1
            if allowed == 0:
                return -1
    return k


def _binary_clauses(b: np.ndarray, U: np.ndarray):
    """Clause arrays for one corner value, or None if some cell has no option."""
    m, n = U.shape
    nx = n - 1
    cap = 4 * (m - 1) * (n - 1)
    lit_a = np.empty(cap, dtype=np.int32)
    lit_b = np.empty(cap, dtype=np.int32)
    k = _forbidden_pairs(np.ascontiguousarray(b, dtype=np.int64), np.ascontiguousarray(U, dtype=np.int64),
                         lit_a, lit_b)
    if k < 0:
        return None
    # 0/1 upper bounds on the border cells
    xs = np.flatnonzero(U[0, 1:] == 0)
    ys = nx + np.flatnonzero(U[1:, 0] == 0)
    units = (2 * np.concatenate((xs, ys)) + 1).astype(np.int32)
    return np.concatenate((lit_a[:k], units)), np.concatenate((lit_b[:k], units))


def solve_binary(S, U) -> Optional[np.ndarray]:
    """A 0/1 matrix ``A <= U`` with 2x2 window sums ``S``, or None if none exists."""
    S, U = _check_dims(S, U)
    if U.min() < 0 or U.max() > 1:
        raise ValueError("binary solver needs U cells in {0, 1}")
    m, n = U.shape
    c, e = offset_parts(S, m, n)
    for a00 in range(int(U[0, 0]) + 1):
        b = c + e if a00 else c
        clauses = _binary_clauses(b, U)
        if clauses is None:
            continue
        res = solve_2sat_arrays(m + n - 2, *clauses)
        if res.satisfiable:
            vals = np.array(res.values, dtype=np.int64)
            return assemble(b, BorderAssignment(a00, vals[: n - 1], vals[n - 1:]))
    return None


# --- bounded cells: difference constraints -------------------------------------

@dataclass
class AlphaBetaSystem:
    """Bounds on ``alpha_j``, ``beta_i`` and ``alpha_j - beta_i`` for one corner value.

    Rows/columns are 1-based in the formulas; arrays here drop the unused
    index 0, so ``alpha_lo[j - 1]`` bounds ``alpha_j``.
    """

    alpha_lo: np.ndarray
    alpha_hi: np.ndarray
    beta_lo: np.ndarray
    beta_hi: np.ndarray
    diff_lo: np.ndarray  # (m-1) x (n-1), bounds on alpha_j - beta_i
    diff_hi: np.ndarray

    @property
    def empty(self) -> bool:
        return bool(
            (self.alpha_lo > self.alpha_hi).any()
            or (self.beta_lo > self.beta_hi).any()
            or (self.diff_lo > self.diff_hi).any()
        )

    def alpha_index(self, j: int) -> int:
        return j - 1

    def beta_index(self, i: int) -> int:
        return len(self.alpha_lo) + i - 1

    @property
    def theta_index(self) -> int:
        return len(self.alpha_lo) + len(self.beta_lo)


def _border_bounds(U: np.ndarray):
    m, n = U.shape
    # x_j = (-1)^j alpha_j in [0, U0j]; y_i = (-1)^(i+1) beta_i in [0, Ui0]
    row = U[0, 1:]
    col = U[1:, 0]
    j_even = np.arange(1, n) % 2 == 0
    i_odd = np.arange(1, m) % 2 == 1
    alpha_lo = np.where(j_even, 0, -row)
    alpha_hi = np.where(j_even, row, 0)
    beta_lo = np.where(i_odd, 0, -col)
    beta_hi = np.where(i_odd, col, 0)
    return alpha_lo, alpha_hi, beta_lo, beta_hi


def _interior_bounds(c: np.ndarray, U: np.ndarray):
    """Bounds on alpha_j - beta_i from c + (-1)^(i+j) (alpha_j - beta_i) in [0, U]."""
    m, n = U.shape
    even = (np.arange(1, m)[:, None] + np.arange(1, n)[None, :]) % 2 == 0
    cc = c[1:, 1:]
    uu = U[1:, 1:]
    return np.where(even, -cc, cc - uu), np.where(even, uu - cc, cc)


def alpha_beta_system(b: np.ndarray, U: np.ndarray) -> AlphaBetaSystem:
    dlo, dhi = _interior_bounds(b, U)
    return AlphaBetaSystem(*_border_bounds(U), dlo, dhi)


def difference_system(abs_: AlphaBetaSystem) -> DiffSystem:
    """Uniformized system: absolute bounds become bounds relative to theta."""
    theta = abs_.theta_index
    sys = DiffSystem(theta + 1)
    for j, (lo, hi) in enumerate(zip(abs_.alpha_lo.tolist(), abs_.alpha_hi.tolist()), start=1):
        sys.add_range(abs_.alpha_index(j), theta, lo, hi)
    for i, (lo, hi) in enumerate(zip(abs_.beta_lo.tolist(), abs_.beta_hi.tolist()), start=1):
        sys.add_range(abs_.beta_index(i), theta, lo, hi)
    nb = len(abs_.alpha_lo)
    dlo = abs_.diff_lo.tolist()
    dhi = abs_.diff_hi.tolist()
    for i in range(len(dlo)):
        bi = nb + i
        for j in range(len(dlo[i])):
            sys.add_range(j, bi, dlo[i][j], dhi[i][j])
    return sys


def _border_from_potentials(d: list[int], m: int, n: int, a00: int) -> BorderAssignment:
    theta = d[m + n - 2]
    alpha = np.array(d[: n - 1], dtype=np.int64) - theta
    beta = np.array(d[n - 1: m + n - 2], dtype=np.int64) - theta
    x = _signs(n)[1:] * alpha
    y = -_signs(m)[1:] * beta
    return BorderAssignment(a00, x, y)


def _check_bounded(S, U):
    S, U = _check_dims(S, U)
    if (U < 0).any():
        raise ValueError("U must be nonnegative")
    return S, U


def _min_corner_reflections(U: np.ndarray) -> list[str]:
    m, n = U.shape
    corners = [(0, 0), (0, n - 1), (m - 1, 0), (m - 1, n - 1)]
    r, c = min(corners, key=lambda rc: U[rc])
    axes = []
    if r:
        axes.append("rows")
    if c:
        axes.append("cols")
    return axes


def solve_bounded(S, U) -> Optional[np.ndarray]:
    """A matrix ``0 <= A <= U`` with 2x2 window sums ``S``, or None.

    The corner with the smallest bound is reflected to (0, 0), then each corner
    value is tried in increasing order; the first feasible one wins.
    """
    S, U = _check_bounded(S, U)
    inst = ReconstructionInstance(WINDOW, S, U)
    records = []
    for axis in _min_corner_reflections(U):
        inst, rec = reflect_instance(inst, axis)
        records.append(rec)
    a = _solve_bounded_at_origin(inst.sums, inst.upper)
    if a is None:
        return None
    for rec in reversed(records):
        a = unreflect(a, rec)
    return a


def _solve_bounded_at_origin(S: np.ndarray, U: np.ndarray) -> Optional[np.ndarray]:
    m, n = U.shape
    c, e = offset_parts(S, m, n)
    for a00 in range(int(U[0, 0]) + 1):
        b = c + a00 * e
        abs_ = alpha_beta_system(b, U)
        if abs_.empty:
            continue
        res = solve_diff(difference_system(abs_))
        if isinstance(res, Feasible):
            return assemble(b, _border_from_potentials(res.values, m, n, a00))
    return None


def solve_bounded_noenum(S, U) -> Optional[np.ndarray]:
    """Single difference-constraint solve with the corner value as a variable.

    With ``b = c + gamma * e`` (``gamma = a00``) and ``beta'_i = beta_i + gamma``
    every interior bound is a bound on ``alpha_j - beta'_i``; the column-0
    bounds become bounds on ``beta'_i - gamma``.
    """
    S, U = _check_bounded(S, U)
    m, n = U.shape
    c, e = offset_parts(S, m, n)
    alpha_lo, alpha_hi, beta_lo, beta_hi = _border_bounds(U)
    dlo, dhi = _interior_bounds(c, U)
    if (dlo > dhi).any():
        return None
    nx, ny = n - 1, m - 1
    gamma, theta = nx + ny, nx + ny + 1
    sys = DiffSystem(nx + ny + 2)
    for j in range(nx):
        sys.add_range(j, theta, int(alpha_lo[j]), int(alpha_hi[j]))
    for i in range(ny):
        sys.add_range(nx + i, gamma, int(beta_lo[i]), int(beta_hi[i]))
    sys.add_range(gamma, theta, 0, int(U[0, 0]))
    dlo, dhi = dlo.tolist(), dhi.tolist()
    for i in range(ny):
        for j in range(nx):
            sys.add_range(j, nx + i, dlo[i][j], dhi[i][j])
    res = solve_diff(sys)
    if not isinstance(res, Feasible):
        return None
    d = res.values
    a00 = d[gamma] - d[theta]
    x = _signs(n)[1:] * (np.array(d[:nx], dtype=np.int64) - d[theta])
    y = -_signs(m)[1:] * (np.array(d[nx:nx + ny], dtype=np.int64) - d[gamma])
    return assemble(c + a00 * e, BorderAssignment(a00, x, y))
