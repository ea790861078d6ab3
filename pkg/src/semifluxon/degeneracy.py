"""Diabolical points of the semifluxon billiard in the flux-position plane.

A degeneracy between levels n and n+1 is a flux position where the gap
k_{n+1} - k_n closes conically.  Candidates come from a grid scan of the gap,
are refined by a Nelder-Mead simplex and are certified by the V shape of the
gap along radial lines.  Collisions of degeneracies under a shape sweep are
located by bisecting on the integer degeneracy count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize

from . import boundary as geo
from .boundary import FluxPosition, ShapeParams
from .errors import ArgumentError, GeometryError, WindowError
from .spectral import DEFAULT_N, LevelList, find_levels
from .specfun import bessel_zero, integer

GAP_TOL = 1e-4
SCAN_STEP = 0.05
SCAN_THRESHOLD = 0.05
SIMPLEX_SIZE = 0.02
DEDUPE_DIST = 0.01
REFINE_N = 14
CONE_RAYS = 8
CONE_LENGTH = 0.02
CONE_R2 = 0.98
WINDOW_PAD = 0.4
MINIMA_FACTOR = 4.0
ZOOM_STEP = 0.02
VALLEY_GAP = 0.005


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class Degeneracy:
    pair: tuple[int, int]
    flux: FluxPosition
    k: float
    gap: float

    def record(self) -> dict:
        return {"pair": list(self.pair), "X": self.flux.X, "Y": self.flux.Y, "k": self.k, "gap": self.gap}


@dataclass(frozen=True)
class NearMiss:
    """Refinement that stalled above the tolerance: a possible avoided crossing."""

    pair: tuple[int, int]
    flux: FluxPosition
    k: float
    gap: float


@dataclass(frozen=True)
class CollisionEvent:
    parameter_name: str
    critical_value: float
    pair: tuple[int, int]
    count_below: int
    count_above: int
    bracket: tuple[float, float] = (math.nan, math.nan)

    def record(self) -> dict:
        return {
            "parameter": self.parameter_name,
            "critical_value": self.critical_value,
            "pair": list(self.pair),
            "count_below": self.count_below,
            "count_above": self.count_above,
            "bracket": list(self.bracket),
        }


@dataclass(frozen=True)
class NoEvent:
    """Counts agree at both ends of the sweep."""

    parameter_name: str
    pair: tuple[int, int]
    count: int
    range: tuple[float, float]

    def record(self) -> dict:
        return {"parameter": self.parameter_name, "pair": list(self.pair), "count": self.count,
                "range": list(self.range), "event": None}


@dataclass(frozen=True)
class ToyModel:
    """M = [[Z - X^2, Y], [Y, X^2 - Z]]."""

    Z: float


@dataclass
class GapSettings:
    N: int = DEFAULT_N
    grid_step: float = 0.01
    margin: float = geo.DEFAULT_MARGIN
    points: str = "arc"


def _check_pair(pair) -> tuple[int, int]:
    n, m = int(pair[0]), int(pair[1])
    if n < 1 or m != n + 1:
        raise ArgumentError(f"pair must be (n, n+1) with n >= 1, got {pair}")
    return n, m


# -------------------------------------------------------------- level windows


@lru_cache(maxsize=256)
def k_floor(shape: ShapeParams) -> float:
    """Wavenumber safely below the ground level.

    Faber-Krahn bounds the field-free Dirichlet ground state from below by the
    equal-area disc, and the flux only raises it.
    """
    area, _ = geo.area_perimeter(shape)
    return 0.9 * bessel_zero(integer(0), 1) * math.sqrt(math.pi / area)


@lru_cache(maxsize=256)
def k_ceiling(shape: ShapeParams, n_levels: int) -> float:
    """Wavenumber comfortably above level ``n_levels`` by the smoothed count."""
    area, length = geo.area_perimeter(shape)
    target = n_levels + 1.5 - 1.0 / 12.0
    # A E / 4 pi - L sqrt(E) / 4 pi = target, quadratic in sqrt(E)
    q = (length + math.sqrt(length**2 + 16 * math.pi * area * target)) / (2 * area)
    return q + WINDOW_PAD


def levels_at(
    shape: ShapeParams, flux: FluxPosition, n_levels: int, settings: GapSettings = GapSettings()
) -> np.ndarray:
    """The lowest ``n_levels`` wavenumbers (with multiplicity) at a flux position."""
    lo = k_floor(shape)
    hi = k_ceiling(shape, n_levels)
    for _ in range(4):
        levels = find_levels(shape, flux, (lo, hi), settings.N, settings.grid_step,
                             settings.margin, settings.points)
        ks = levels.ks
        if len(ks) >= n_levels + 1 or (len(ks) >= n_levels and ks[n_levels - 1] < hi - WINDOW_PAD):
            return ks[:n_levels]
        hi += 1.0
    raise WindowError(f"could not bracket {n_levels} levels at ({flux.X}, {flux.Y})")


def gap(
    shape: ShapeParams,
    flux: FluxPosition,
    n: int,
    k_window=None,
    N: int = DEFAULT_N,
    margin: float = geo.DEFAULT_MARGIN,
    points: str = "arc",
) -> tuple[float, float]:
    """(k_{n+1} - k_n, mean of the two) at one flux position.

    With ``k_window`` the levels are counted inside it, so it must start below
    the ground level; otherwise the window is derived from the shape.
    """
    if n < 1:
        raise ArgumentError("level index must be >= 1")
    settings = GapSettings(N=N, margin=margin, points=points)
    if k_window is None:
        ks = levels_at(shape, flux, n + 1, settings)
    else:
        levels = find_levels(shape, flux, k_window, N, settings.grid_step, margin, points)
        ks = levels.ks
        if len(ks) < n + 1:
            raise WindowError(
                f"only {len(ks)} levels in window {tuple(k_window)}, need {n + 1}; widen it"
            )
    return float(ks[n] - ks[n - 1]), float(0.5 * (ks[n] + ks[n - 1]))


# ------------------------------------------------------------------ grid scan


@dataclass
class GapGrid:
    """Gaps of consecutive levels on a rectangular grid of flux positions.

    ``gaps[i, j, n-1]`` is k_{n+1} - k_n at (xs[j], ys[i]); NaN outside the
    admissible region.  ``kmid`` holds the matching pair means.
    """

    xs: np.ndarray
    ys: np.ndarray
    gaps: np.ndarray
    kmid: np.ndarray
    inside: np.ndarray = field(repr=False)


def _grid_point_levels(args):
    shape, X, Y, n_levels, settings = args
    try:
        return levels_at(shape, FluxPosition(X, Y), n_levels, settings)
    except (WindowError, GeometryError):
        return None


def scan_grid(
    shape: ShapeParams,
    n_levels: int,
    grid_step: float = SCAN_STEP,
    settings: GapSettings = GapSettings(),
    workers: int = 1,
    bbox=None,
) -> GapGrid:
    """Levels 1..n_levels at every admissible grid point.

    The grid covers ``bbox = (x0, x1, y0, y1)``, by default the bounding box
    of the boundary.
    """
    geo.validate_shape(shape)
    if grid_step <= 0:
        raise ArgumentError("grid_step must be positive")
    if bbox is None:
        poly = geo._polygon(shape, geo.GEOMETRY_SAMPLES)
        x0, x1 = poly.real.min(), poly.real.max()
        y0, y1 = poly.imag.min(), poly.imag.max()
    else:
        x0, x1, y0, y1 = bbox
    # grid anchored at the origin so that symmetric shapes give symmetric grids
    xs = grid_step * np.arange(math.floor(x0 / grid_step), math.ceil(x1 / grid_step) + 1)
    ys = grid_step * np.arange(math.floor(y0 / grid_step), math.ceil(y1 / grid_step) + 1)
    XX, YY = np.meshgrid(xs, ys)
    pts = (XX + 1j * YY).ravel()
    inside = (geo.winding_number(shape, pts) == 1) & (geo.boundary_distance(shape, pts) >= settings.margin)
    jobs = [(shape, float(p.real), float(p.imag), n_levels, settings) for p in pts[inside]]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_grid_point_levels, jobs, chunksize=8))
    else:
        results = [_grid_point_levels(j) for j in jobs]
    ks = np.full((pts.size, n_levels), np.nan)
    idx = np.flatnonzero(inside)
    for i, r in zip(idx, results):
        if r is not None:
            ks[i] = r
    ks = ks.reshape(XX.shape + (n_levels,))
    gaps = np.diff(ks, axis=-1)
    kmid = 0.5 * (ks[..., 1:] + ks[..., :-1])
    return GapGrid(xs, ys, gaps, kmid, inside.reshape(XX.shape))


def _clusters(grid: GapGrid, n: int, threshold: float) -> list[list[tuple[int, int]]]:
    g = grid.gaps[..., n - 1]
    mask = np.nan_to_num(g, nan=np.inf) < threshold
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    return [list(zip(*np.nonzero(labels == lab))) for lab in range(1, count + 1)]


def _local_minima(grid: GapGrid, n: int, threshold: float) -> list[tuple[int, int]]:
    g = np.nan_to_num(grid.gaps[..., n - 1], nan=np.inf)
    low = ndimage.minimum_filter(g, size=3, mode="constant", cval=np.inf)
    return [tuple(ij) for ij in np.argwhere((g == low) & (g < threshold))]


def _seed_cells(grid: GapGrid, n: int, threshold: float, minima_factor: float) -> list[tuple[int, int]]:
    g = grid.gaps[..., n - 1]
    clusters = _clusters(grid, n, threshold)
    seeds = [min(c, key=lambda c: g[c]) for c in clusters]
    members = {c for cl in clusters for c in cl}
    # a cone apex between grid nodes can leave every node above the threshold;
    # isolated grid minima up to minima_factor * threshold are kept as seeds
    for c in _local_minima(grid, n, minima_factor * threshold):
        if c not in members:
            seeds.append(c)
    seeds.sort(key=lambda c: (g[c], c))
    return seeds


def candidates_from_grid(
    grid: GapGrid, pair, threshold: float = SCAN_THRESHOLD, minima_factor: float = MINIMA_FACTOR
) -> list[FluxPosition]:
    n, _ = _check_pair(pair)
    return [FluxPosition(float(grid.xs[j]), float(grid.ys[i]))
            for i, j in _seed_cells(grid, n, threshold, minima_factor)]


def scan_candidates(
    shape: ShapeParams,
    pair,
    grid_step: float = SCAN_STEP,
    gap_threshold: float = SCAN_THRESHOLD,
    settings: GapSettings = GapSettings(),
    workers: int = 1,
) -> list[FluxPosition]:
    """One representative (the smallest-gap cell) per connected low-gap cluster.

    Isolated local minima of the gap below ``MINIMA_FACTOR * gap_threshold``
    are added, since the grid can straddle a narrow cone.
    """
    n, m = _check_pair(pair)
    grid = scan_grid(shape, m, grid_step, settings, workers)
    return candidates_from_grid(grid, (n, m), gap_threshold)


# ----------------------------------------------------------------- refinement


class _Converged(Exception):
    pass


class _GapObjective:
    """Memoised gap of one pair; inadmissible positions are penalised."""

    def __init__(self, shape, n, settings, stop_below=None, avoid=()):
        self.shape, self.n, self.settings = shape, n, settings
        self.stop_below = stop_below
        self.avoid = list(avoid)
        self.cache: dict[tuple[float, float], tuple[float, float]] = {}
        self.best = (math.inf, math.nan, (math.nan, math.nan))

    def pair_gap(self, X, Y):
        key = (float(X), float(Y))
        if key not in self.cache:
            flux = FluxPosition(*key)
            if not geo.is_admissible(self.shape, flux, self.settings.margin):
                self.cache[key] = (math.inf, math.nan)
            else:
                ks = levels_at(self.shape, flux, self.n + 1, self.settings)
                self.cache[key] = (float(ks[self.n] - ks[self.n - 1]),
                                   float(0.5 * (ks[self.n] + ks[self.n - 1])))
        return self.cache[key]

    def __call__(self, p):
        g, kmid = self.pair_gap(p[0], p[1])
        value = g
        for q in self.avoid:
            # deflation: divide out the cone of an already located point
            d = math.hypot(p[0] - q[0], p[1] - q[1])
            if d < DEDUPE_DIST:
                return value / max(d / SIMPLEX_SIZE, 1e-12)
            value /= min(1.0, d / SIMPLEX_SIZE)
        if g < self.best[0]:
            self.best = (g, kmid, (float(p[0]), float(p[1])))
        if self.stop_below is not None and g < self.stop_below:
            raise _Converged
        return value


def _simplex(objective, seed, size):
    x0 = np.array(seed, dtype=float)
    simplex = np.array([x0, x0 + (size, 0.0), x0 + (0.0, size)])
    try:
        minimize(objective, x0, method="Nelder-Mead",
                 options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-9, "maxfev": 300})
    except _Converged:
        pass


def refine(
    shape: ShapeParams,
    pair,
    seed: FluxPosition,
    tol: float = GAP_TOL,
    N: int = REFINE_N,
    margin: float = geo.DEFAULT_MARGIN,
    points: str = "arc",
    avoid=(),
    restarts: int = 2,
) -> Degeneracy | NearMiss:
    """Nelder-Mead minimisation of the gap from ``seed``.

    Stops as soon as the gap drops below ``tol / 10`` and returns a
    Degeneracy when the best gap is below ``tol``, a NearMiss otherwise.
    ``avoid`` lists already known degeneracies to deflate away.
    """
    n, m = _check_pair(pair)
    settings = GapSettings(N=N, margin=margin, points=points)
    obj = _GapObjective(shape, n, settings, stop_below=tol / 10, avoid=[(q.X, q.Y) for q in avoid])
    start, size = (seed.X, seed.Y), SIMPLEX_SIZE
    for _ in range(restarts + 1):
        _simplex(obj, start, size)
        if obj.best[0] < tol:
            break
        start, size = obj.best[2], size / 4
    g, kmid, (X, Y) = obj.best
    flux = FluxPosition(X, Y)
    if g < tol:
        return Degeneracy((n, m), flux, kmid, g)
    return NearMiss((n, m), flux, kmid, g)


# ---------------------------------------------------------- cone certificates


def _linear_r2(t, y) -> float:
    A = np.vstack([t, np.ones_like(t)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss = float(np.sum((y - y.mean()) ** 2))
    return 1.0 if ss == 0 else 1.0 - float(resid @ resid) / ss


def cone_profile(
    shape: ShapeParams,
    deg: Degeneracy,
    rays: int = CONE_RAYS,
    length: float = CONE_LENGTH,
    samples: int = 5,
    N: int = REFINE_N,
) -> np.ndarray:
    """R^2 of a straight-line fit of the gap along each of ``rays`` rays."""
    n = deg.pair[0]
    settings = GapSettings(N=N)
    t = length * np.arange(1, samples + 1) / samples
    out = []
    for a in 2 * np.pi * np.arange(rays) / rays:
        g = [gap_value(shape, FluxPosition(deg.flux.X + s * math.cos(a), deg.flux.Y + s * math.sin(a)), n, settings)
             for s in t]
        out.append(_linear_r2(t, np.array(g)))
    return np.array(out)


def radial_profile(
    shape: ShapeParams, deg: Degeneracy, half_width: float = 0.01, samples: int = 5, N: int = REFINE_N
) -> tuple[np.ndarray, np.ndarray]:
    """Gap along the line through the origin and the degeneracy (fixed azimuth)."""
    az = math.atan2(deg.flux.Y, deg.flux.X) if math.hypot(deg.flux.X, deg.flux.Y) > 1e-9 else 0.0
    t = half_width * np.arange(-samples, samples + 1) / samples
    settings = GapSettings(N=N)
    g = np.array([gap_value(shape, FluxPosition(deg.flux.X + s * math.cos(az), deg.flux.Y + s * math.sin(az)),
                            deg.pair[0], settings) for s in t])
    return t, g


def is_v_shaped(t: np.ndarray, g: np.ndarray, r2: float = CONE_R2) -> bool:
    """Both flanks rise linearly away from the minimum."""
    i = int(np.argmin(g))
    left, right = slice(0, i + 1), slice(i, len(t))
    ok = True
    for sl, sign in ((left, -1), (right, 1)):
        tt, gg = t[sl], g[sl]
        if len(tt) < 3:
            continue
        slope = np.polyfit(tt, gg, 1)[0]
        ok &= sign * slope > 0 and _linear_r2(tt, gg) >= r2
    return bool(ok)


def gap_value(shape, flux, n, settings: GapSettings = GapSettings(N=REFINE_N)) -> float:
    ks = levels_at(shape, flux, n + 1, settings)
    return float(ks[n] - ks[n - 1])


# -------------------------------------------------------------------- catalog


def _dedupe(found: list[Degeneracy]) -> list[Degeneracy]:
    out: list[Degeneracy] = []
    for d in sorted(found, key=lambda d: d.gap):
        if all(d.pair != e.pair or math.hypot(d.flux.X - e.flux.X, d.flux.Y - e.flux.Y) >= DEDUPE_DIST
               for e in out):
            out.append(d)
    return out


def _sort_key(d: Degeneracy):
    return (d.pair, round(d.flux.X, 9), round(d.flux.Y, 9))


@dataclass
class CatalogResult:
    degeneracies: list[Degeneracy]
    near_misses: list[NearMiss]
    grid: GapGrid | None = None

    def for_pair(self, pair) -> list[Degeneracy]:
        return [d for d in self.degeneracies if d.pair == tuple(pair)]


def _zoom_boxes(grid: GapGrid, n: int, threshold: float, minima_factor: float) -> list[tuple]:
    """Bounding boxes (padded by one cell) of low-gap clusters and isolated minima."""
    step = float(grid.xs[1] - grid.xs[0]) if len(grid.xs) > 1 else SCAN_STEP
    clusters = _clusters(grid, n, threshold)
    members = {c for cl in clusters for c in cl}
    groups = clusters + [[c] for c in _local_minima(grid, n, minima_factor * threshold) if c not in members]
    boxes = []
    for cells in groups:
        ii = [c[0] for c in cells]
        jj = [c[1] for c in cells]
        boxes.append((grid.xs[min(jj)] - step, grid.xs[max(jj)] + step,
                      grid.ys[min(ii)] - step, grid.ys[max(ii)] + step))
    return boxes


def zoom_seeds(
    shape: ShapeParams,
    grid: GapGrid,
    pair,
    threshold: float = SCAN_THRESHOLD,
    zoom_step: float = ZOOM_STEP,
    settings: GapSettings = GapSettings(),
    workers: int = 1,
) -> list[FluxPosition]:
    """Rescan every candidate region at ``zoom_step``; return (seed, is_minimum).

    Local minima come first, then valley nodes with gap below VALLEY_GAP.

    A cluster of the coarse scan may hold several degeneracies (a near-circular
    shape has a broad valley of small gap); the finer grid separates them.
    """
    n, m = _check_pair(pair)
    seeds: list[tuple[float, FluxPosition, bool]] = []
    for box in _zoom_boxes(grid, n, threshold, MINIMA_FACTOR):
        fine = scan_grid(shape, m, zoom_step, settings, workers, bbox=box)
        g = fine.gaps[..., n - 1]
        minima = set(_local_minima(fine, n, MINIMA_FACTOR * threshold))
        # two cones sharing a narrow valley give one minimum on the fine grid;
        # every deep valley node is offered as a fallback seed
        valley = {tuple(ij) for ij in np.argwhere(np.nan_to_num(g, nan=np.inf) < VALLEY_GAP)}
        for i, j in minima | valley:
            seeds.append((float(g[i, j]), FluxPosition(float(fine.xs[j]), float(fine.ys[i])), (i, j) in minima))
    seeds.sort(key=lambda t: (not t[2], t[0], t[1].X, t[1].Y))
    out: list[tuple[FluxPosition, bool]] = []
    for _, p, is_min in seeds:
        # overlapping boxes report the same node twice
        if all(abs(p.X - q.X) > 1e-9 or abs(p.Y - q.Y) > 1e-9 for q, _ in out):
            out.append((p, is_min))
    return out


def catalog_detailed(
    shape: ShapeParams,
    n_max: int = 4,
    pairs=None,
    grid_step: float = SCAN_STEP,
    gap_threshold: float = SCAN_THRESHOLD,
    zoom_step: float = ZOOM_STEP,
    scan_N: int = DEFAULT_N,
    refine_N: int = REFINE_N,
    tol: float = GAP_TOL,
    margin: float = geo.DEFAULT_MARGIN,
    workers: int = 1,
    partner_search: bool = True,
) -> CatalogResult:
    """Scan, zoom, refine and deduplicate degeneracies for pairs (n, n+1), n < n_max.

    Already located degeneracies of the pair are deflated out of the
    objective, so a seed in a shared low-gap valley does not slide into the
    cone found first.  With ``partner_search`` every hit is followed by one
    deflated search started at the hit itself.
    """
    if n_max < 2:
        raise ArgumentError("n_max must be >= 2 (the lowest pair is (1, 2))")
    pairs = [(n, n + 1) for n in range(1, n_max)] if pairs is None else [_check_pair(p) for p in pairs]
    top = max(p[1] for p in pairs)
    settings = GapSettings(N=scan_N, margin=margin)
    grid = scan_grid(shape, top, grid_step, settings, workers)
    found: list[Degeneracy] = []
    misses: list[NearMiss] = []
    for pair in pairs:
        pair_found: list[Degeneracy] = []
        for seed, is_min in zoom_seeds(shape, grid, pair, gap_threshold, zoom_step, settings, workers):
            near = DEDUPE_DIST if is_min else 2 * zoom_step
            if any(math.hypot(d.flux.X - seed.X, d.flux.Y - seed.Y) < near for d in pair_found):
                continue
            res = refine(shape, pair, seed, tol, refine_N, margin, avoid=[d.flux for d in pair_found])
            if isinstance(res, NearMiss):
                if is_min:
                    misses.append(res)
                continue
            pair_found = _dedupe(pair_found + [res])
            if partner_search:
                # a second cone closer than the zoom grid resolves, e.g. just before a collision
                partner = refine(shape, pair, res.flux, tol, refine_N, margin,
                                 avoid=[d.flux for d in pair_found], restarts=1)
                if isinstance(partner, Degeneracy):
                    pair_found = _dedupe(pair_found + [partner])
        found.extend(pair_found)
    found.sort(key=_sort_key)
    return CatalogResult(found, misses, grid)


def catalog(shape: ShapeParams, n_max: int = 4, k_max=None, **kwargs) -> list[Degeneracy]:
    """Sorted degeneracy list for pairs (n, n+1), n < n_max.

    ``k_max`` optionally drops degeneracies above that wavenumber.
    """
    out = catalog_detailed(shape, n_max, **kwargs).degeneracies
    if k_max is not None:
        out = [d for d in out if d.k <= k_max]
    return out


def level_counts(degs: list[Degeneracy], n_max: int) -> dict[int, int]:
    """Number of degeneracies touching each level 1..n_max-1 (pairs (n-1, n) and (n, n+1))."""
    return {lvl: sum(1 for d in degs if lvl in d.pair) for lvl in range(1, n_max)}


# ------------------------------------------------------------------ toy model


def toy_eigen(model: ToyModel, X: float, Y: float) -> tuple[float, float]:
    r = math.hypot(model.Z - X * X, Y)
    return -r, r


def toy_degeneracies(model: ToyModel) -> list[FluxPosition]:
    """Zeros of the toy gap: Y = 0 and the real roots of Z - X^2."""
    roots = np.roots([-1.0, 0.0, model.Z])
    real = sorted({float(r.real) for r in roots if abs(r.imag) <= 1e-12 * max(1.0, abs(r))})
    return [FluxPosition(x, 0.0) for x in real]


def toy_counter(pair=(1, 2)) -> Callable[[float], int]:
    return lambda Z: len(toy_degeneracies(ToyModel(float(Z))))


# ------------------------------------------------------------------ collisions


def billiard_counter(
    a3: float,
    sigma: float,
    pair,
    **catalog_kwargs,
) -> Callable[[float], int]:
    """a2 -> number of cataloged degeneracies of ``pair`` on shape (a2, a3, sigma)."""
    pair = _check_pair(pair)

    def count(a2: float) -> int:
        res = catalog_detailed(ShapeParams(float(a2), a3, sigma), pair[1], pairs=[pair], **catalog_kwargs)
        return len(res.for_pair(pair))

    return count


def track_collision(
    count: Callable[[float], int],
    param_range,
    pair=(1, 2),
    parameter_name: str = "a2",
    width: float = 1e-4,
    count_lo: int | None = None,
    count_hi: int | None = None,
) -> CollisionEvent | NoEvent:
    """Bisect on an integer-valued count until the bracket is narrower than ``width``.

    A midpoint whose count matches neither end (the degenerate count right at
    the collision) is treated as belonging to the upper side.
    """
    lo, hi = float(param_range[0]), float(param_range[1])
    if not lo < hi:
        raise ArgumentError("parameter range must be increasing")
    if width <= 0:
        raise ArgumentError("bisection width must be positive")
    c_lo = count(lo) if count_lo is None else count_lo
    c_hi = count(hi) if count_hi is None else count_hi
    if c_lo == c_hi:
        return NoEvent(parameter_name, tuple(pair), c_lo, (lo, hi))
    a, b = lo, hi
    while b - a > width:
        mid = 0.5 * (a + b)
        c = count(mid)
        if c == c_lo:
            a = mid
        else:
            b = mid
    return CollisionEvent(parameter_name, 0.5 * (a + b), tuple(pair), c_lo, c_hi, (a, b))


def codimension(n_levels: int) -> tuple[int, int]:
    """(codimension of an n-fold coincidence, minimum number of semifluxons)."""
    if int(n_levels) != n_levels or n_levels < 2:
        raise ArgumentError("n_levels must be an integer >= 2")
    n = int(n_levels)
    return (n + 2) * (n - 1) // 2, n * (n + 1) // 4


__all__ = [
    "Degeneracy",
    "NearMiss",
    "CollisionEvent",
    "NoEvent",
    "ToyModel",
    "GapSettings",
    "GapGrid",
    "CatalogResult",
    "gap",
    "levels_at",
    "scan_grid",
    "scan_candidates",
    "candidates_from_grid",
    "refine",
    "cone_profile",
    "radial_profile",
    "is_v_shaped",
    "catalog",
    "catalog_detailed",
    "zoom_seeds",
    "level_counts",
    "toy_eigen",
    "toy_degeneracies",
    "toy_counter",
    "billiard_counter",
    "track_collision",
    "codimension",
]
