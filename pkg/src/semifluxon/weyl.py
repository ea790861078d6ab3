"""Spectral staircase against the smoothed semifluxon Weyl law.

A missing level shifts the residual N(E) - N_smoothed(E) down by one above
its energy, a spurious level shifts it up; that is what makes the comparison
a completeness check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError

GRID_POINTS = 200


@dataclass
class StaircaseReport:
    E_grid: np.ndarray
    counted: np.ndarray
    smoothed: np.ndarray
    max_abs_residual: float

    @property
    def residual(self) -> np.ndarray:
        return self.counted - self.smoothed

    def rows(self):
        return zip(self.E_grid, self.counted, self.smoothed, self.residual)


def smoothed_staircase(A: float, L: float, E):
    """A E / 4 pi - L sqrt(E) / 4 pi + 1/12 (the 1/12 is the half-flux term)."""
    E_arr = np.asarray(E, dtype=float)
    if np.any(E_arr < 0):
        raise ArgumentError("energy must be non-negative")
    out = A * E_arr / (4 * math.pi) - L * np.sqrt(E_arr) / (4 * math.pi) + 1.0 / 12.0
    return float(out) if out.ndim == 0 else out


def counting_function(ks, E) -> np.ndarray:
    """#{n : k_n^2 < E}, degenerate levels counted with multiplicity."""
    energies = np.sort(np.asarray(ks, dtype=float) ** 2)
    return np.searchsorted(energies, np.asarray(E, dtype=float), side="left")


def compare(levels, A: float, L: float, E_max: float, points: int = GRID_POINTS) -> StaircaseReport:
    """Staircase of ``levels`` (a LevelList or plain k array) on a uniform E grid."""
    if E_max <= 0:
        raise ArgumentError("E_max must be positive")
    ks = levels.ks if hasattr(levels, "ks") else np.asarray(levels, dtype=float)
    E = np.linspace(E_max / points, E_max, points)
    counted = counting_function(ks, E)
    smooth = smoothed_staircase(A, L, E)
    return StaircaseReport(E, counted, smooth, float(np.max(np.abs(counted - smooth))))
