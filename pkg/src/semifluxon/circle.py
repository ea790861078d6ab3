"""Unit-circle billiard with the semifluxon displaced by R along the X axis.

Graf's addition theorem re-expands the flux-centred basis about the circle
centre; folding the negative angular orders onto s >= 0 gives, for even (cos)
and odd (sin) states,

    M[s, n] = J_{s+1/2}(k) J_{s-n}(kR) -/+ (-1)^{s+n} J_{-s-1/2}(k) J_{s+n+1}(kR)

and the levels are the zeros of det M truncated to 0 <= s, n < S.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError
from .spectral import DEFAULT_STEP, LevelList, _log_envelope, levels_from_builder
from .specfun import half, bessel_zeros, half_integer_table, integer_table, neg_half_integer_table

DEFAULT_S = 12
PARITIES = ("even", "odd")


@dataclass
class CircleSpectrumSlice:
    R: float
    parity: str
    ks: LevelList


def _check(parity: str, R: float, S: int) -> float:
    if parity not in PARITIES:
        raise ArgumentError(f"parity must be 'even' or 'odd', got {parity!r}")
    if not 0.0 <= R < 1.0:
        raise ArgumentError("flux displacement R must lie in [0, 1)")
    if S < 1:
        raise ArgumentError("truncation S must be >= 1")
    return -1.0 if parity == "even" else 1.0


def _batch(parity: str, ks: np.ndarray, R: float, S: int) -> np.ndarray:
    sgn = _check(parity, R, S)
    ks = np.asarray(ks, dtype=float)
    jh = half_integer_table(S - 1, ks).T  # (nk, S): J_{s+1/2}(k)
    jn = neg_half_integer_table(S - 1, ks).T  # (nk, S): J_{-s-1/2}(k)
    ji = integer_table(2 * S, ks * R).T  # (nk, 2S+1): J_m(kR)
    s = np.arange(S)[:, None]
    n = np.arange(S)[None, :]
    diff = s - n
    j_diff = ji[:, np.abs(diff)] * np.where((diff < 0) & (diff % 2 == 1), -1.0, 1.0)
    j_sum = ji[:, s + n + 1]
    alt = np.where((s + n) % 2 == 0, 1.0, -1.0)
    return jh[:, :, None] * j_diff + sgn * alt * jn[:, :, None] * j_sum


def circle_matrix(parity: str, k: float, R: float, S: int = DEFAULT_S) -> np.ndarray:
    """Unscaled S x S matrix; rows s, columns n."""
    if k <= 0:
        raise ArgumentError("wavenumber must be positive")
    return _batch(parity, np.array([k]), R, S)[0]


def _row_scales(ks: np.ndarray, R: float, S: int) -> np.ndarray:
    """Smooth positive row scales: envelope of the two terms of row s."""
    nu = np.arange(S) + 0.5
    first = np.exp(_log_envelope(nu, ks[:, None]))
    if R == 0.0:
        return first
    jh = half_integer_table(S - 1, ks).T
    jn = neg_half_integer_table(S - 1, ks).T
    modulus = np.hypot(jh, jn)
    second = modulus * np.exp(_log_envelope(nu + 0.5, ks[:, None] * R))
    return first + second


def circle_builder(parity: str, R: float, S: int = DEFAULT_S):
    _check(parity, R, S)

    def build(ks):
        ks = np.asarray(ks, dtype=float)
        return _batch(parity, ks, R, S) / _row_scales(ks, R, S)[:, :, None]

    return build


def circle_levels(
    parity: str, R: float, k_range, S: int = DEFAULT_S, grid_step: float = DEFAULT_STEP
) -> LevelList:
    k_lo, k_hi = k_range
    if not (0 < k_lo < k_hi):
        raise ArgumentError(f"empty or invalid k range [{k_lo}, {k_hi}]")
    return levels_from_builder(circle_builder(parity, R, S), k_lo, k_hi, grid_step)


def circle_slice(parity: str, R: float, k_range, S: int = DEFAULT_S) -> CircleSpectrumSlice:
    return CircleSpectrumSlice(R, parity, circle_levels(parity, R, k_range, S))


def circle_center_levels(count: int) -> LevelList:
    """First ``count`` distinct zeros of the J_{n+1/2}, each doubly degenerate."""
    if count < 1:
        raise ArgumentError("count must be >= 1")
    zeros: list[float] = []
    for n in range(count):
        zeros.extend(bessel_zeros(half(n), count))
    zeros = sorted(zeros)[:count]
    return LevelList(zeros, [2] * count, [0.0] * count, [True] * count)


def circle_spectrum(R_values, parities=PARITIES, k_range=(2.0, 8.0), S: int = DEFAULT_S):
    """Rows (R, parity, level_index, k) over an R scan, ascending R."""
    rows = []
    for R in sorted(float(r) for r in R_values):
        for parity in parities:
            levels = circle_levels(parity, float(R), k_range, S)
            for i, k in enumerate(levels.ks, start=1):
                rows.append((float(R), parity, i, float(k)))
    return rows


def circle_ground_limit() -> float:
    """First zero of J_0, the R -> 1 limit of the ground level."""
    from .specfun import integer

    return bessel_zeros(integer(0), 1)[0]


__all__ = [
    "CircleSpectrumSlice",
    "circle_matrix",
    "circle_builder",
    "circle_levels",
    "circle_slice",
    "circle_center_levels",
    "circle_spectrum",
    "circle_ground_limit",
    "DEFAULT_S",
]
