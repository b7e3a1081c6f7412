"""Integer matrices, the window-sum operator and reconstruction instances.

Matrices are plain 2-D ``numpy.int64`` arrays.  Instances freeze their arrays
(``writeable = False``) so they can be shared without copying.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# (max |cell|) * rows * cols must stay below this so no intermediate sum can
# overflow int64.
SAFE_LIMIT = 1 << 62


class DimensionError(ValueError):
    pass


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Convert nested lists (or an array) into a validated int64 matrix."""
    if isinstance(data, np.ndarray):
        arr = data
        if arr.dtype.kind not in "iub":
            raise ValueError(f"{name}: integer entries required, got {arr.dtype}")
    else:
        rows = list(data)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError(f"{name}: ragged rows")
        for r in rows:
            for v in r:
                if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                    raise ValueError(f"{name}: non-integer entry {v!r}")
        width = widths.pop() if widths else 0
        try:
            arr = np.array(rows, dtype=np.int64).reshape(len(rows), width)
        except OverflowError:
            raise ValueError(f"{name}: entry does not fit in 64 bits") from None
    if arr.ndim != 2:
        raise ValueError(f"{name}: expected 2-D matrix, got {arr.ndim}-D")
    arr = arr.astype(np.int64, copy=False)
    check_magnitude(arr, name)
    return arr


def check_magnitude(arr: np.ndarray, name: str = "matrix") -> None:
    if arr.size == 0:
        return
    peak = max(int(arr.max()), -int(arr.min()))
    if peak * arr.shape[0] * arr.shape[1] >= SAFE_LIMIT:
        raise ValueError(f"{name}: magnitude {peak} too large for {arr.shape} (64-bit limit)")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.int64, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class WindowShape:
    height: int
    width: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError(f"window must be at least 1x1, got {self.height}x{self.width}")


def sums_shape(rows: int, cols: int, shape: WindowShape) -> tuple[int, int]:
    """Dimensions of the sums matrix; zero when the window does not fit."""
    return max(0, rows - shape.height + 1), max(0, cols - shape.width + 1)


def window_sums(a, shape: WindowShape) -> np.ndarray:
    """Sum of ``a`` over every ``shape``-sized block, indexed by top-left corner."""
    a = as_matrix(a, "A")
    h, w = shape.height, shape.width
    m, n = a.shape
    if m < h or n < w:
        raise DimensionError(f"matrix {m}x{n} is smaller than window {h}x{w}")
    c = np.zeros((m + 1, n + 1), dtype=np.int64)
    np.cumsum(a, axis=0, out=c[1:, 1:])
    np.cumsum(c[1:, 1:], axis=1, out=c[1:, 1:])
    return c[h:, w:] - c[:-h, w:] - c[h:, :-w] + c[:-h, :-w]


@dataclass(frozen=True, eq=False)
class ReconstructionInstance:
    """Window shape, target sums and per-cell bounds (``lower`` defaults to 0)."""

    shape: WindowShape
    sums: np.ndarray
    upper: np.ndarray
    lower: Optional[np.ndarray] = None

    def __post_init__(self):
        upper = as_matrix(self.upper, "U")
        sums = self.sums
        m, n = upper.shape
        expected = sums_shape(m, n, self.shape)
        if not isinstance(sums, np.ndarray) and len(sums) == 0:
            sums = np.zeros(expected, dtype=np.int64)
        sums = as_matrix(sums, "S")
        if sums.size == 0 and 0 in expected:
            sums = sums.reshape(expected)
        if sums.shape != expected:
            raise DimensionError(f"S has shape {sums.shape}, expected {expected} for U {m}x{n}")
        object.__setattr__(self, "upper", _frozen(upper))
        object.__setattr__(self, "sums", _frozen(sums))
        if self.lower is not None:
            lower = as_matrix(self.lower, "L")
            if lower.shape != upper.shape:
                raise DimensionError(f"L has shape {lower.shape}, U has {upper.shape}")
            if np.any(lower > upper):
                i, j = np.argwhere(lower > upper)[0]
                raise ValueError(f"L > U at cell ({i}, {j})")
            object.__setattr__(self, "lower", _frozen(lower))

    @property
    def rows(self) -> int:
        return self.upper.shape[0]

    @property
    def cols(self) -> int:
        return self.upper.shape[1]

    def lower_or_zero(self) -> np.ndarray:
        if self.lower is None:
            return np.zeros_like(self.upper)
        return self.lower

    def to_json(self) -> dict:
        doc = {
            "window": [self.shape.height, self.shape.width],
            "S": self.sums.tolist(),
            "U": self.upper.tolist(),
        }
        if self.lower is not None:
            doc["L"] = self.lower.tolist()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ReconstructionInstance":
        try:
            h, w = doc["window"]
            return cls(WindowShape(int(h), int(w)), doc["S"], doc["U"], doc.get("L"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance document: {exc}") from None


def load_instance(path) -> ReconstructionInstance:
    with open(path) as fh:
        return ReconstructionInstance.from_json(json.load(fh))


@dataclass
class Verdict:
    """Outcome of :func:`verify_solution`; truthy when the matrix is a solution."""

    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify_solution(a, inst: ReconstructionInstance) -> Verdict:
    """Check ``lower <= a <= upper`` and that ``a`` has the instance's window sums."""
    a = as_matrix(a, "A")
    if a.shape != inst.upper.shape:
        raise DimensionError(f"A has shape {a.shape}, instance expects {inst.upper.shape}")
    lower = inst.lower_or_zero()
    for bad, what in ((a < lower, "below lower bound"), (a > inst.upper, "above upper bound")):
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return Verdict(False, f"cell ({i}, {j}) = {a[i, j]} {what}")
    if inst.sums.size:
        got = window_sums(a, inst.shape)
        diff = got != inst.sums
        if diff.any():
            i, j = np.argwhere(diff)[0]
            return Verdict(False, f"window ({i}, {j}) sums to {got[i, j]}, expected {inst.sums[i, j]}")
    return Verdict(True)


@dataclass(frozen=True, eq=False)
class BackShift:
    lower: np.ndarray = field(repr=False)


def shift_two_sided(inst: ReconstructionInstance) -> tuple[ReconstructionInstance, BackShift]:
    """Replace ``L <= A <= U`` by ``0 <= X <= U - L`` with ``A = L + X``."""
    if inst.lower is None:
        raise ValueError("instance has no lower bounds to shift")
    lower = inst.lower
    sums = inst.sums
    if sums.size:
        sums = sums - window_sums(lower, inst.shape)
    shifted = ReconstructionInstance(inst.shape, sums, inst.upper - lower)
    return shifted, BackShift(lower)


def lift_solution(x, record: BackShift) -> np.ndarray:
    x = as_matrix(x, "X")
    if x.shape != record.lower.shape:
        raise DimensionError(f"X has shape {x.shape}, back-shift expects {record.lower.shape}")
    return record.lower + x


@dataclass(frozen=True)
class Reflection:
    axis: str


def reflect(a: np.ndarray, axis: str) -> np.ndarray:
    if axis == "rows":
        return a[::-1, :].copy()
    if axis == "cols":
        return a[:, ::-1].copy()
    raise ValueError(f"axis must be 'rows' or 'cols', got {axis!r}")


def reflect_instance(inst: ReconstructionInstance, axis: str) -> tuple[ReconstructionInstance, Reflection]:
    """Mirror every matrix of the instance; undo on solutions with ``unreflect``."""
    lower = None if inst.lower is None else reflect(inst.lower, axis)
    out = ReconstructionInstance(inst.shape, reflect(inst.sums, axis), reflect(inst.upper, axis), lower)
    return out, Reflection(axis)


def unreflect(a, record: Reflection) -> np.ndarray:
    return reflect(as_matrix(a, "A"), record.axis)
