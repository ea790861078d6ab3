"""Boundary-collocation eigenproblem for a semifluxon billiard.

The real wavefunction is expanded about the flux as

    f(rho, mu) = sum_n J_{n+1/2}(k rho) (c_n cos((n+1/2) mu) + s_n sin((n+1/2) mu))

and forced to vanish at 2N boundary points.  Levels are the k at which the
resulting 2N x 2N determinant vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import boundary as geo
from .boundary import FluxPolar, FluxPosition, ShapeParams
from .errors import ArgumentError, NotAnEigenvalueError
from .specfun import half_integer_table

ROOT_TOL = 1e-10
MERGE_TOL = 1e-7
SIGMA_ROOT = 1e-6
SIGMA_DOUBLE = 1e-4
DIP_RATIO = 1e-3
SIGMA_EIGEN = 1e-5
SINGULAR_LOG_DET = -30.0
DEFAULT_STEP = 0.01
MIN_STEP = 1e-3
DEFAULT_N = 10

BatchBuilder = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------- data types


@dataclass
class CollocationMatrix:
    k: float
    N: int
    entries: np.ndarray
    column_scales: np.ndarray

    @property
    def raw(self) -> np.ndarray:
        """Unscaled matrix."""
        return self.entries * self.column_scales[None, :]


@dataclass
class LevelList:
    """Distinct roots in ascending order with their multiplicities.

    ``ks`` repeats each root by its multiplicity, so ``ks[i]`` is level i + 1.
    ``double`` marks roots where the matrix is numerically rank-2 deficient
    (a genuine degeneracy rather than an unresolved close pair).
    """

    roots: np.ndarray
    multiplicity: np.ndarray
    residuals: np.ndarray
    double: np.ndarray = field(default=None)

    def __post_init__(self):
        self.roots = np.asarray(self.roots, dtype=float)
        self.multiplicity = np.asarray(self.multiplicity, dtype=int)
        self.residuals = np.asarray(self.residuals, dtype=float)
        if self.double is None:
            self.double = self.multiplicity > 1
        self.double = np.asarray(self.double, dtype=bool)

    @property
    def ks(self) -> np.ndarray:
        return np.repeat(self.roots, self.multiplicity)

    @property
    def energies(self) -> np.ndarray:
        return self.ks**2

    def __len__(self) -> int:
        return int(self.multiplicity.sum())


@dataclass
class ModeCoefficients:
    c: np.ndarray
    s: np.ndarray

    @property
    def e(self) -> np.ndarray:
        return np.hypot(self.c, self.s)

    @property
    def chi(self) -> np.ndarray:
        return np.arctan2(-self.s, self.c)

    @property
    def N(self) -> int:
        return len(self.c)


# ------------------------------------------------------------ matrix building


def _log_envelope(nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    """log of a smooth, zero-free envelope of |J_nu(x)|.

    Combines the small-argument power law with the large-argument amplitude
    sqrt(2 / (pi x)) as t a / (t + a).
    """
    log_t = nu * np.log(0.5 * x) - np.vectorize(math.lgamma)(nu + 1.0)
    log_a = 0.5 * np.log(2.0 / (np.pi * x))
    return log_t + log_a - np.logaddexp(log_t, log_a)


def column_scales(N: int, k, rho_max: float) -> np.ndarray:
    """Positive column scales for wavenumber(s) ``k``; shape ``k.shape + (2N,)``.

    The scale of the order-nu columns is the envelope of J_nu at k * rho_max,
    so it is smooth in k and never tracks the zeros of J_nu.
    """
    k = np.asarray(k, dtype=float)
    nu = np.arange(N) + 0.5
    env = np.exp(_log_envelope(nu, k[..., None] * rho_max))
    return np.concatenate([env, env], axis=-1)


@dataclass(frozen=True)
class _Geometry:
    rho: np.ndarray
    cos_t: np.ndarray
    sin_t: np.ndarray

    @property
    def N(self) -> int:
        return self.cos_t.shape[1]


POINT_RULES = ("arc", "phi")


def collocation_phis(shape: ShapeParams, flux: FluxPosition, N: int, points: str = "arc") -> np.ndarray:
    """Boundary parameters of the 2N collocation points.

    ``points="phi"`` puts them at phi_m = m pi / N.  ``points="arc"`` (default)
    spaces them evenly in arclength; the two rules coincide for the circle,
    and "arc" converges much faster on the deformed shapes.
    """
    if points == "phi":
        return geo.collocation_angles(N)
    if points == "arc":
        return geo.arclength_angles(shape, N)
    raise ArgumentError(f"unknown collocation point rule {points!r}")


@lru_cache(maxsize=4096)
def _geometry(shape: ShapeParams, flux: FluxPosition, N: int, points: str = "arc") -> _Geometry:
    phis = collocation_phis(shape, flux, N, points)
    rho, mu = geo.flux_polar_many(shape, phis, flux)
    # one continuous branch along the boundary: mu = phi for the centred circle
    mu = np.unwrap(mu)
    orders = np.arange(N) + 0.5
    ang = mu[:, None] * orders[None, :]
    return _Geometry(rho, np.cos(ang), np.sin(ang))


def _raw_batch(g: _Geometry, ks: np.ndarray) -> np.ndarray:
    ks = np.asarray(ks, dtype=float)
    x = ks[:, None] * g.rho[None, :]
    J = half_integer_table(g.N - 1, x)  # (N, nk, 2N)
    J = np.moveaxis(J, 0, -1)  # (nk, 2N rows, N)
    return np.concatenate([J * g.cos_t, J * g.sin_t], axis=-1)


def _scaled_batch(g: _Geometry, ks: np.ndarray) -> np.ndarray:
    raw = _raw_batch(g, ks)
    return raw / column_scales(g.N, ks, float(g.rho.max()))[:, None, :]


def _check_inputs(shape, flux, N, margin):
    if not 1 <= N <= 25:
        raise ArgumentError("truncation N must satisfy 1 <= N <= 25")
    geo.validate_shape(shape)
    geo.require_admissible(shape, flux, margin)


def build_matrix(
    shape: ShapeParams,
    flux: FluxPosition,
    k: float,
    N: int = DEFAULT_N,
    margin: float = geo.DEFAULT_MARGIN,
    points: str = "arc",
) -> CollocationMatrix:
    if k <= 0:
        raise ArgumentError("wavenumber must be positive")
    _check_inputs(shape, flux, N, margin)
    g = _geometry(shape, flux, N, points)
    raw = _raw_batch(g, np.array([k]))[0]
    scales = column_scales(N, k, float(g.rho.max()))
    return CollocationMatrix(float(k), N, raw / scales[None, :], scales)


def collocation_builder(
    shape: ShapeParams,
    flux: FluxPosition,
    N: int = DEFAULT_N,
    margin: float = geo.DEFAULT_MARGIN,
    points: str = "arc",
) -> BatchBuilder:
    """Batch builder ``ks -> (nk, 2N, 2N)`` of scaled collocation matrices."""
    _check_inputs(shape, flux, N, margin)
    g = _geometry(shape, flux, N, points)
    return lambda ks: _scaled_batch(g, ks)


def det_indicator(M) -> tuple[int, float]:
    """Sign and log|det| by LU with partial pivoting; ``(0, -inf)`` if singular."""
    a = M.entries if isinstance(M, CollocationMatrix) else np.asarray(M, dtype=float)
    sign, logabs = np.linalg.slogdet(a)
    if sign == 0:
        return 0, -math.inf
    return int(sign), float(logabs)


def smallest_singulars(M) -> tuple[float, float]:
    a = M.entries if isinstance(M, CollocationMatrix) else np.asarray(M, dtype=float)
    sv = np.linalg.svd(a, compute_uv=False)
    if len(sv) == 1:
        return float(sv[-1]), float(sv[-1])
    return float(sv[-1]), float(sv[-2])


# --------------------------------------------------------------- root search


class _Scan:
    """Determinant and singular-value samples of a batch builder on a k grid."""

    def __init__(self, build: BatchBuilder, ks: np.ndarray):
        mats = build(ks)
        self.ks = ks
        self.sign, self.logabs = np.linalg.slogdet(mats)
        sv = np.linalg.svd(mats, compute_uv=False)
        self.smin = sv[:, -1]
        self.snext = sv[:, -2] if sv.shape[1] > 1 else sv[:, -1]


def _signed_det(build: BatchBuilder, ref: float) -> Callable[[float], float]:
    def func(k):
        sign, logabs = np.linalg.slogdet(build(np.array([k]))[0])
        return float(sign * math.exp(max(logabs - ref, -700.0)))

    return func


def _sigmas(build: BatchBuilder, k: float) -> tuple[float, float]:
    sv = np.linalg.svd(build(np.array([k]))[0], compute_uv=False)
    return float(sv[-1]), float(sv[-2] if len(sv) > 1 else sv[-1])


def _refine_bracket(build, a, b, ref):
    func = _signed_det(build, ref)
    fa, fb = func(a), func(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        # batch and single evaluations disagree on the sign: rounding noise
        return None
    return brentq(func, a, b, xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps)


def _roots_in_dip(build, a, b, ref, sign_a):
    """Roots inside [a, b] where the determinant keeps its sign at both ends.

    Returns a list of (root, multiplicity, double_flag, sigma_min).
    """
    func = _signed_det(build, ref)
    res = minimize_scalar(lambda k: sign_a * func(k), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-11})
    kstar = float(res.x)
    if sign_a * func(kstar) < 0:
        r1 = brentq(func, a, kstar, xtol=ROOT_TOL)
        r2 = brentq(func, kstar, b, xtol=ROOT_TOL)
        return [(r1, 1, False, _sigmas(build, r1)[0]), (r2, 1, False, _sigmas(build, r2)[0])]
    res = minimize_scalar(lambda k: _sigmas(build, k)[0], bounds=(a, b), method="bounded",
                          options={"xatol": 1e-11})
    kmin = float(res.x)
    smin, snext = _sigmas(build, kmin)
    # a conditioning dip is not a root: demand a collapse relative to the ends
    ends = max(_sigmas(build, a)[0], _sigmas(build, b)[0])
    if smin < SIGMA_ROOT and smin < DIP_RATIO * ends:
        # no sign change means an even number of roots: count two
        return [(kmin, 2, snext < SIGMA_DOUBLE, smin)]
    return []


def _scan_roots(build: BatchBuilder, k_lo: float, k_hi: float, step: float) -> list[tuple]:
    n = max(int(math.ceil((k_hi - k_lo) / step)), 2)
    ks = np.linspace(k_lo, k_hi, n + 1)
    sc = _Scan(build, ks)
    found: list[tuple] = []
    change = sc.sign[:-1] * sc.sign[1:] < 0
    exact = np.flatnonzero(sc.sign == 0)
    for i in exact:
        found.append((float(ks[i]), 1, False, float(sc.smin[i])))
    for i in np.flatnonzero(change):
        ref = float(sc.logabs[i])
        r = _refine_bracket(build, float(ks[i]), float(ks[i + 1]), ref)
        if r is not None:
            found.append((r, 1, False, _sigmas(build, r)[0]))
    # log|det| dips with no sign change on either side
    for i in range(1, n):
        if not (sc.logabs[i] <= sc.logabs[i - 1] and sc.logabs[i] <= sc.logabs[i + 1]):
            continue
        if change[i - 1] or change[i] or sc.sign[i] == 0:
            continue
        found.extend(_roots_in_dip(build, float(ks[i - 1]), float(ks[i + 1]),
                                   float(sc.logabs[i]), float(sc.sign[i - 1])))
    # endpoint dips (minimum of sigma at the first/last sample)
    for i, j in ((0, 1), (n, n - 1)):
        if sc.logabs[i] < sc.logabs[j] and sc.smin[i] < SIGMA_ROOT and sc.sign[i] != 0:
            lo, hi = sorted((float(ks[i]), float(ks[j])))
            found.extend(r for r in _roots_in_dip(build, lo, hi, float(sc.logabs[i]),
                                                   float(sc.sign[i])) if k_lo <= r[0] <= k_hi)
    found.sort(key=lambda r: r[0])
    return found


def _merge(found: list[tuple]) -> list[tuple]:
    merged: list[list] = []
    for r in found:
        if merged and r[0] - merged[-1][0] < MERGE_TOL:
            last = merged[-1]
            last[1] = max(last[1] + r[1], 2)
            last[2] = last[2] or r[2]
            last[3] = min(last[3], r[3])
        else:
            merged.append(list(r))
    return [tuple(m) for m in merged]


def levels_from_builder(
    build: BatchBuilder, k_lo: float, k_hi: float, grid_step: float = DEFAULT_STEP
) -> LevelList:
    """All determinant roots of a batch builder inside [k_lo, k_hi].

    Sign changes on the k grid are refined by Brent bisection.  Local minima
    of the smallest singular value without a sign change are searched for a
    hidden close pair, and otherwise admitted as a double root.  Where two
    roots end up closer than three grid steps the neighbourhood is rescanned
    with half the step.
    """
    if not (0 < k_lo < k_hi):
        raise ArgumentError(f"empty or invalid k range [{k_lo}, {k_hi}]")
    if grid_step <= 0:
        raise ArgumentError("grid_step must be positive")
    found = _merge(_scan_roots(build, k_lo, k_hi, grid_step))
    step = grid_step
    while step / 2 >= MIN_STEP:
        close = [i for i in range(len(found) - 1) if found[i + 1][0] - found[i][0] < 3 * step]
        if not close:
            break
        step /= 2
        windows: list[list[float]] = []
        for i in close:
            lo = max(k_lo, found[i][0] - 2 * step)
            hi = min(k_hi, found[i + 1][0] + 2 * step)
            if windows and lo <= windows[-1][1]:
                windows[-1][1] = hi
            else:
                windows.append([lo, hi])
        for lo, hi in windows:
            redo = _scan_roots(build, lo, hi, step)
            keep = [r for r in found if not lo <= r[0] <= hi]
            found = _merge(sorted(keep + redo, key=lambda r: r[0]))
    if not found:
        return LevelList([], [], [])
    roots, mult, dbl, res = zip(*[(r[0], r[1], r[2], r[3]) for r in found])
    return LevelList(roots, mult, res, dbl)


def find_levels(
    shape: ShapeParams,
    flux: FluxPosition,
    k_range,
    N: int = DEFAULT_N,
    grid_step: float = DEFAULT_STEP,
    margin: float = geo.DEFAULT_MARGIN,
    points: str = "arc",
) -> LevelList:
    k_lo, k_hi = k_range
    if not (0 < k_lo < k_hi):
        raise ArgumentError(f"empty or invalid k range [{k_lo}, {k_hi}]")
    build = collocation_builder(shape, flux, N, margin, points)
    return levels_from_builder(build, k_lo, k_hi, grid_step)


# ------------------------------------------------------- eigenvector, field


def mode_coefficients(
    shape: ShapeParams,
    flux: FluxPosition,
    k_level: float,
    N: int = DEFAULT_N,
    margin: float = geo.DEFAULT_MARGIN,
    points: str = "arc",
) -> ModeCoefficients:
    """Null vector of the collocation matrix at a level, as (c, s) coefficients."""
    M = build_matrix(shape, flux, k_level, N, margin, points)
    _, sv, vt = np.linalg.svd(M.entries)
    if sv[-1] > SIGMA_EIGEN:
        raise NotAnEigenvalueError(
            f"k = {k_level} is not a level (smallest singular value {sv[-1]:.3e})"
        )
    coef = vt[-1] / M.column_scales
    coef /= np.linalg.norm(coef)
    nz = np.flatnonzero(np.abs(coef) > 1e-14 * np.abs(coef).max())
    c, s = coef[:N], coef[N:]
    first_c = [i for i in nz if i < N]
    lead = first_c[0] if first_c else nz[0]
    if coef[lead] < 0:
        coef = -coef
        c, s = coef[:N], coef[N:]
    return ModeCoefficients(c.copy(), s.copy())


def eval_f_polar(coeffs: ModeCoefficients, k: float, rho, mu):
    """Truncated expansion at flux-centred polar coordinates (arrays allowed)."""
    rho = np.asarray(rho, dtype=float)
    mu = np.asarray(mu, dtype=float)
    J = half_integer_table(coeffs.N - 1, k * rho)
    nu = (np.arange(coeffs.N) + 0.5).reshape((-1,) + (1,) * rho.ndim)
    terms = J * (coeffs.c.reshape(nu.shape) * np.cos(nu * mu) + coeffs.s.reshape(nu.shape) * np.sin(nu * mu))
    out = terms.sum(axis=0)
    return float(out) if out.ndim == 0 else out


def eval_f(coeffs: ModeCoefficients, flux: FluxPosition, k: float, point: FluxPolar) -> float:
    """f at a point given in polar coordinates about ``flux``."""
    return eval_f_polar(coeffs, k, point.rho, point.mu)


def eval_f_xy(coeffs: ModeCoefficients, flux: FluxPosition, k: float, z, mu_ref=None):
    """f at Cartesian point(s) ``z`` (complex).

    The angle about the flux is taken on the branch closest to ``mu_ref``
    (principal branch when omitted); this fixes the sign of the double-valued f.
    """
    w = np.asarray(z, dtype=complex) - flux.z
    mu = np.angle(w)
    if mu_ref is not None:
        mu = mu_ref + np.angle(np.exp(1j * (mu - mu_ref)))
    return eval_f_polar(coeffs, k, np.abs(w), mu)
