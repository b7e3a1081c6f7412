"""Reconstructing integer matrices from their window sums."""

from .matrix import (
    ReconstructionInstance,
    WindowShape,
    lift_solution,
    reflect_instance,
    shift_two_sided,
    verify_solution,
    window_sums,
)
from .solver22 import solve_binary, solve_bounded, solve_bounded_noenum

__all__ = [
    "ReconstructionInstance",
    "WindowShape",
    "lift_solution",
    "reflect_instance",
    "shift_two_sided",
    "solve_binary",
    "solve_bounded",
    "solve_bounded_noenum",
    "verify_solution",
    "window_sums",
]
