from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class CorollaryReport:
    """Both sides of an identity sampled on a grid, with the worst discrepancy."""

    name: str
    grid: tuple[float, ...]
    lhs: tuple[complex, ...]
    rhs: tuple[complex, ...]
    max_abs_err: float

    @classmethod
    def build(cls, name: str, grid: Sequence[float], lhs, rhs) -> CorollaryReport:
        lhs = np.atleast_1d(np.asarray(lhs, dtype=complex))
        rhs = np.atleast_1d(np.asarray(rhs, dtype=complex))
        if lhs.shape != rhs.shape or lhs.size != len(grid):
            raise ValueError("grid, lhs and rhs must have equal length")
        err = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
        return cls(
            name,
            tuple(float(x) for x in grid),
            tuple(complex(x) for x in lhs),
            tuple(complex(x) for x in rhs),
            err,
        )

    @property
    def w_grid(self) -> tuple[float, ...]:
        return self.grid

    def passed(self, tol: float) -> bool:
        return self.max_abs_err <= tol
