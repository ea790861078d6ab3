"""Bessel functions of the first kind for the orders the solver needs.

Three families are covered: half-integer orders n + 1/2, negative
half-integer orders -(n + 1/2) and integer orders m.  All evaluations are
vectorised over the argument and return whole tables of consecutive orders,
because the collocation and addition-theorem matrices consume every order
up to a truncation at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, DomainError

__all__ = [
    "BesselOrder",
    "half",
    "neg_half",
    "integer",
    "bessel_j",
    "bessel_zero",
    "bessel_zeros",
    "half_integer_table",
    "neg_half_integer_table",
    "integer_table",
    "integer_series",
]

_BIG = 1e250
_SERIES_SWITCH = 3.0


@dataclass(frozen=True)
class BesselOrder:
    """Order of a Bessel function: ``half``, ``neg_half`` or ``integer``."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("half", "neg_half", "integer"):
            raise ArgumentError(f"unknown Bessel order kind {self.kind!r}")
        if self.kind != "integer" and self.n < 0:
            raise ArgumentError("half-integer order index must be >= 0")

    @property
    def nu(self) -> float:
        if self.kind == "half":
            return self.n + 0.5
        if self.kind == "neg_half":
            return -(self.n + 0.5)
        return float(self.n)


def half(n: int) -> BesselOrder:
    return BesselOrder("half", n)


def neg_half(n: int) -> BesselOrder:
    return BesselOrder("neg_half", n)


def integer(m: int) -> BesselOrder:
    return BesselOrder("integer", m)


def _start_order(nmax: int, xmax: float) -> int:
    top = max(nmax, xmax)
    return int(top + 20 + 4.0 * math.sqrt(top)) + 1


def _check_args(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise DomainError("Bessel argument must be finite and >= 0")
    return x


def _downward(x: np.ndarray, start: int, nu0: float, stop: int) -> np.ndarray:
    """Miller recurrence from order ``nu0 + start`` down to ``nu0 + stop``.

    Returns an unnormalised table ``t[i]`` proportional to J_{nu0 + stop + i}.
    Rows are rescaled jointly whenever the running values threaten overflow.
    """
    nrows = start - stop + 1
    table = np.zeros((nrows,) + x.shape)
    upper = np.zeros_like(x)
    cur = np.ones_like(x)
    table[-1] = cur
    for idx in range(nrows - 1, 0, -1):
        nu = nu0 + stop + idx
        nxt = (2.0 * nu / x) * cur - upper
        upper, cur = cur, nxt
        table[idx - 1] = cur
        big = np.abs(cur) > _BIG
        if np.any(big):
            table[:, big] /= _BIG
            upper[big] /= _BIG
            cur[big] /= _BIG
    return table


def half_integer_table(nmax: int, x) -> np.ndarray:
    """Table of J_{n+1/2}(x) for n = 0..nmax, shape ``(nmax + 1,) + x.shape``.

    Downward recurrence normalised against the closed forms of J_{1/2} and
    J_{-1/2} (least squares over the pair, so zeros of either are harmless).
    """
    x = _check_args(x)
    out = np.zeros((nmax + 1,) + x.shape)
    pos = x > 0
    if not np.any(pos):
        return out
    xp = x[pos]
    start = _start_order(nmax, float(xp.max()))
    # rows: order -1/2, 1/2, 3/2, ...
    table = _downward(xp, start, 0.5, -1)
    amp = np.sqrt(2.0 / (np.pi * xp))
    j_plus, j_minus = amp * np.sin(xp), amp * np.cos(xp)
    size = np.maximum(np.abs(table[0]), np.abs(table[1]))
    t_plus, t_minus = table[1] / size, table[0] / size
    ratio = (t_plus * j_plus + t_minus * j_minus) / (t_plus**2 + t_minus**2)
    out[:, pos] = (table[1 : nmax + 2] / size) * ratio
    return out


def neg_half_integer_table(nmax: int, x) -> np.ndarray:
    """Table of J_{-(n+1/2)}(x) for n = 0..nmax.

    Recurrence towards more negative order is the dominant direction, so
    plain forward stepping from the two closed forms is stable.
    """
    x = _check_args(x)
    if np.any(x == 0):
        raise DomainError("J of negative half-integer order has a pole at x = 0")
    out = np.empty((nmax + 1,) + x.shape)
    amp = np.sqrt(2.0 / (np.pi * x))
    prev = amp * np.sin(x)  # J_{1/2}
    cur = amp * np.cos(x)  # J_{-1/2}
    out[0] = cur
    for n in range(1, nmax + 1):
        # J_{nu-1} = (2 nu / x) J_nu - J_{nu+1} with nu = -(n - 1/2)
        nu = -(n - 0.5)
        nxt = (2.0 * nu / x) * cur - prev
        prev, cur = cur, nxt
        out[n] = cur
    return out


def integer_series(mmax: int, x) -> np.ndarray:
    """Power-series table of J_m(x), m = 0..mmax (accurate for small x)."""
    x = _check_args(x)
    half_x = 0.5 * x
    q = -(half_x**2)
    out = np.empty((mmax + 1,) + x.shape)
    for m in range(mmax + 1):
        with np.errstate(divide="ignore"):
            term = np.exp(m * np.log(half_x) - math.lgamma(m + 1)) if m else np.ones_like(x)
        total = term.copy()
        for k in range(1, 80):
            term = term * q / (k * (k + m))
            total += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
                break
        out[m] = total
    return out


def integer_table(mmax: int, x) -> np.ndarray:
    """Table of J_m(x) for m = 0..mmax, x >= 0.

    Power series below a small switch point, Miller recurrence normalised by
    J_0 + 2 sum J_{2k} = 1 above it.
    """
    x = _check_args(x)
    out = np.zeros((mmax + 1,) + x.shape)
    small = x <= _SERIES_SWITCH
    if np.any(small):
        out[:, small] = integer_series(mmax, x[small])
    large = ~small
    if np.any(large):
        xl = x[large]
        start = _start_order(mmax, float(xl.max()))
        start += start % 2
        table = _downward(xl, start, 0.0, 0)
        norm = table[0] + 2.0 * table[2::2].sum(axis=0)
        out[:, large] = table[: mmax + 1] / norm
    return out


def bessel_j(order: BesselOrder, x):
    """J_nu(x) for a single order; scalar in, scalar out."""
    arr = np.asarray(x, dtype=float)
    if order.kind == "half":
        val = half_integer_table(order.n, arr)[order.n]
    elif order.kind == "neg_half":
        val = neg_half_integer_table(order.n, arr)[order.n]
    else:
        m = abs(order.n)
        val = integer_table(m, arr)[m]
        if order.n < 0 and m % 2:
            val = -val
    return float(val) if val.ndim == 0 else val


def _bisect(func, lo: float, hi: float, flo: float, tol: float = 1e-12) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def bessel_zeros(order: BesselOrder, count: int) -> tuple[float, ...]:
    """First ``count`` positive zeros of J_nu by grid bracketing and bisection."""
    if order.kind == "neg_half":
        raise ArgumentError("zeros are provided for half and non-negative integer orders")
    if order.kind == "integer" and order.n < 0:
        raise ArgumentError("zeros are provided for non-negative integer orders")
    if count < 1:
        raise ArgumentError("zero index must be >= 1")

    def func(t):
        return bessel_j(order, t)

    step = 0.1
    # past the last zero the spacing tends to pi; the grid is grown in chunks
    zeros: list[float] = []
    lo = step
    while len(zeros) < count:
        grid = lo + step * np.arange(400)
        vals = bessel_j(order, grid)
        for i in range(len(grid) - 1):
            a, b = vals[i], vals[i + 1]
            if a == 0.0:
                zeros.append(float(grid[i]))
            elif a * b < 0:
                zeros.append(_bisect(func, float(grid[i]), float(grid[i + 1]), float(a)))
            if len(zeros) == count:
                break
        lo = float(grid[-1])
    return tuple(zeros)


def bessel_zero(order: BesselOrder, zero_index: int) -> float:
    """The ``zero_index``-th positive zero of J_nu (1-based)."""
    if zero_index < 1:
        raise ArgumentError("zero index must be >= 1")
    return bessel_zeros(order, zero_index)[zero_index - 1]
