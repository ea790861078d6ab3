"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (also repeated
in the terminal summary) and then asserts at the stated tolerance.

Criterion 7 runs the full a2 bisection only when SEMIFLUXON_FULL_COLLISION=1;
the default coarse mode checks the count transition at the two ends of the
interval.
"""

import math
import os
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from conftest import ACCEPTANCE_LINES
from semifluxon.boundary import (
    AFRICA_SHAPE,
    CIRCLE,
    REFERENCE_SHAPE,
    TABLE_SHAPE,
    FluxPosition,
    ShapeParams,
    area_perimeter,
)
from semifluxon.circle import circle_levels
from semifluxon.degeneracy import (
    CollisionEvent,
    billiard_counter,
    catalog,
    codimension,
    level_counts,
    levels_at,
    scan_grid,
    toy_counter,
    track_collision,
)
from semifluxon.nodal_force import force, nodal_info
from semifluxon.spectral import ModeCoefficients, eval_f_polar, find_levels
from semifluxon.specfun import bessel_j, bessel_zeros, half, half_integer_table
from semifluxon.weyl import compare

pytestmark = pytest.mark.acceptance

CENTRE = [math.pi, 4.4934095, 5.7634592, 2 * math.pi, 6.9879320]
J0_ZERO = 2.4048256
TABLE = [
    ((1, 2), 0.16, -0.03, 3.05),
    ((2, 3), 0.71, -0.45, 3.82),
    ((2, 3), -0.40, 0.44, 3.82),
    ((3, 4), -0.08, 0.08, 4.34),
    ((3, 4), 0.38, 0.10, 4.40),
    ((3, 4), 0.18, -0.30, 4.38),
]
COLLISION_REFERENCE = 0.007108


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print("\n" + line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


# ------------------------------------------------------------------- 1


def test_criterion_01_circle_centre_spectrum():
    t0 = time.perf_counter()
    want = np.repeat(CENTRE, 2)
    merged = np.sort(np.concatenate([circle_levels(p, 0.0, (2.0, 7.1)).ks for p in ("even", "odd")]))
    colloc = find_levels(CIRCLE, FluxPosition(0.0, 0.0), (2.0, 7.1), N=10).ks
    elapsed = time.perf_counter() - t0
    err_circle = np.max(np.abs(merged - want)) if len(merged) == 10 else math.inf
    err_colloc = np.max(np.abs(colloc - want)) if len(colloc) == 10 else math.inf
    # the oracle values are quoted to 7 decimals; compare against the exact zeros too
    exact = np.repeat(sorted(z for n in range(5) for z in bessel_zeros(half(n), 3) if z < 7.1), 2)
    err_exact = max(np.max(np.abs(merged - exact)), np.max(np.abs(colloc - exact)))
    ok = err_circle <= 1e-6 and err_colloc <= 1e-6 and err_exact <= 1e-6 and elapsed < 10.0
    report(1, ok, f"10 levels; circle err {err_circle:.1e}, collocation err {err_colloc:.1e}, "
                  f"vs exact zeros {err_exact:.1e}, {elapsed:.1f} s")


# ------------------------------------------------------------------- 2


def test_criterion_02_circle_limit():
    Rs = [0.7, 0.75, 0.8, 0.85, 0.9, 0.95]
    ground = [min(circle_levels(p, R, (1.5, 4.0)).ks[0] for p in ("even", "odd")) for R in Rs]
    dist = [abs(g - J0_ZERO) for g in ground]
    ok = dist[-1] < 0.05 and all(np.diff(dist) < 0)
    report(2, ok, f"ground at R=0.95 is {ground[-1]:.6f} (|diff| {dist[-1]:.4f}); "
                  f"distance to the limit monotone over R in [0.7, 0.95]: {all(np.diff(dist) < 0)}")


# ------------------------------------------------------------------- 3


def _odd_gap(R: float) -> float:
    ks = circle_levels("odd", R, (2.0, 7.0)).ks
    return float(ks[3] - ks[2])


def test_criterion_03_avoided_crossing():
    Rs = np.arange(0.15, 0.2501, 0.005)
    gaps = [_odd_gap(float(R)) for R in Rs]
    i = int(np.argmin(gaps))
    lo, hi = Rs[max(i - 1, 0)], Rs[min(i + 1, len(Rs) - 1)]
    res = minimize_scalar(_odd_gap, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    g = min(res.fun, min(gaps))
    ok = 0.0 < g < 0.05
    report(3, ok, f"min gap of odd levels 3-4 over R in [0.15, 0.25] is {g:.5f} at R={res.x:.4f} "
                  f"(required: 0 < gap < 0.05)")


# ---------------------------------------------------------------- 4, 5


@pytest.fixture(scope="module")
def table_catalog():
    t0 = time.perf_counter()
    degs = catalog(TABLE_SHAPE, 4)
    return degs, time.perf_counter() - t0


def test_criterion_04_table_reproduction(table_catalog):
    degs, elapsed = table_catalog
    unmatched = list(degs)
    misses = []
    for pair, X, Y, k in TABLE:
        hit = next((d for d in unmatched if d.pair == pair and abs(d.flux.X - X) <= 0.02
                    and abs(d.flux.Y - Y) <= 0.02 and abs(d.k - k) <= 0.02), None)
        if hit is None:
            misses.append((pair, X, Y, k))
        else:
            unmatched.remove(hit)
    ok = len(degs) == 6 and not misses and elapsed <= 1800
    found = "; ".join(f"{d.pair} ({d.flux.X:.4f}, {d.flux.Y:.4f}) k={d.k:.4f}" for d in degs)
    report(4, ok, f"{len(degs)} degeneracies in {elapsed:.0f} s, unmatched table rows {misses}: {found}")


def test_criterion_05_odd_count_law(table_catalog):
    degs, _ = table_catalog
    counts = level_counts(degs, 4)
    ok = counts == {1: 1, 2: 3, 3: 5}
    report(5, ok, f"degeneracies touching levels 1, 2, 3: {counts[1]}, {counts[2]}, {counts[3]}")


# ------------------------------------------------------------------- 6


def test_criterion_06_weyl_staircase():
    A, L = area_perimeter(REFERENCE_SHAPE)
    levels = find_levels(REFERENCE_SHAPE, FluxPosition(0.0, 0.0), (1.0, math.sqrt(60.0) + 0.05), N=20)
    rep = compare(levels, A, L, 60.0)
    ok = rep.max_abs_residual <= 2.0
    report(6, ok, f"{len(levels.ks)} levels to E=60 with 2N=40, A={A:.5f}, L={L:.5f}, "
                  f"max |N - N_smoothed| = {rep.max_abs_residual:.3f}")


# ------------------------------------------------------------------- 7


def test_criterion_07_collision():
    counter = billiard_counter(0.08, math.pi / 3, (3, 4))
    t0 = time.perf_counter()
    c_lo, c_hi = counter(0.0), counter(0.015)
    transition = (c_lo, c_hi) == (5, 3)
    if os.environ.get("SEMIFLUXON_FULL_COLLISION") != "1":
        report(7, transition, f"coarse mode: counts {c_lo} at a2=0 and {c_hi} at a2=0.015 "
                              f"(full bisection: set SEMIFLUXON_FULL_COLLISION=1)")
        return
    ev = track_collision(counter, (0.0, 0.015), (3, 4), "a2", 1e-4, count_lo=c_lo, count_hi=c_hi)
    elapsed = time.perf_counter() - t0
    ok = (transition and isinstance(ev, CollisionEvent) and 0.0 < ev.critical_value < 0.015
          and ev.bracket[1] - ev.bracket[0] <= 1e-4
          and abs(ev.critical_value - COLLISION_REFERENCE) <= 0.002)
    crit = getattr(ev, "critical_value", math.nan)
    report(7, ok, f"counts {c_lo} -> {c_hi}; critical a2 = {crit:.5f} bracket {getattr(ev, 'bracket', None)} "
                  f"(reference {COLLISION_REFERENCE}, allowed 0.002), {elapsed / 60:.0f} min")


# ------------------------------------------------------------------- 8


def test_criterion_08_toy_collision():
    ev = track_collision(toy_counter(), (-1.0, 1.0), (1, 2), "Z", 1e-6)
    ok = (isinstance(ev, CollisionEvent) and abs(ev.critical_value) <= 1e-6
          and (ev.count_below, ev.count_above) == (0, 2))
    report(8, ok, f"critical Z = {ev.critical_value:.2e}, counts {ev.count_below}/{ev.count_above}")


# ------------------------------------------------------------------- 9


FORCE_SAMPLES = [
    (REFERENCE_SHAPE, (0.3, 0.2), 1),
    (REFERENCE_SHAPE, (-0.4, 0.1), 1),
    (REFERENCE_SHAPE, (0.1, -0.5), 2),
    (REFERENCE_SHAPE, (0.5, 0.4), 3),
    (TABLE_SHAPE, (0.3, 0.2), 2),
    (TABLE_SHAPE, (-0.3, -0.3), 1),
    (TABLE_SHAPE, (0.6, 0.1), 3),
    (AFRICA_SHAPE, (0.2, 0.1), 1),
    (AFRICA_SHAPE, (0.4, -0.2), 3),
    (CIRCLE, (0.2, 0.4), 2),
]


def test_criterion_09_force_alignment():
    worst_cos, worst_along, small_gap = 1.0, math.inf, []
    for shape, (X, Y), level in FORCE_SAMPLES:
        flux = FluxPosition(X, Y)
        ks = levels_at(shape, flux, level + 1)
        gaps = np.diff(ks)[max(level - 2, 0):level]
        if gaps.min() <= 0.1:
            small_gap.append((X, Y, level))
        est = force(shape, flux, level)
        info = nodal_info(shape, flux, est.k)
        chord = info.polyline[-1] - info.polyline[0]
        along = float(np.dot(est.hf_gradient, [chord.real, chord.imag]) / abs(chord))
        worst_cos = min(worst_cos, est.alignment_cos)
        worst_along = min(worst_along, along)
    ok = worst_cos > 0.99 and worst_along > 0 and not small_gap
    report(9, ok, f"{len(FORCE_SAMPLES)} samples with gap > 0.1 (violations {small_gap}); "
                  f"min alignment cos {worst_cos:.6f}; min gradient component along the nodal line "
                  f"{worst_along:.3f}")


# ------------------------------------------------------------------ 10


def test_criterion_10_codimension():
    got = {n: codimension(n) for n in (2, 3, 4)}
    ok = got == {2: (2, 1), 3: (5, 3), 4: (9, 5)}
    report(10, ok, f"codimension, semifluxons: {got}")


# ------------------------------------------------------------------ 11


def test_criterion_11_property_suites():
    rng = np.random.default_rng(11)
    parts = {}

    # Bessel three-term recurrence and interlacing of zeros
    x = rng.uniform(0.5, 30.0, 200)
    tab = half_integer_table(12, x)
    nu = np.arange(1, 12) + 0.5
    rec = np.max(np.abs(tab[:-2] + tab[2:] - 2 * nu[:, None] / x * tab[1:-1]))
    inter = all(
        a < b < c
        for n in range(6)
        for a, b, c in zip(bessel_zeros(half(n), 6), bessel_zeros(half(n + 1), 6), bessel_zeros(half(n), 7)[1:])
    )
    parts["bessel"] = rec < 1e-12 and inter

    # antiperiodicity of the semifluxon expansion
    c = ModeCoefficients(rng.normal(size=8), rng.normal(size=8))
    rho, mu = rng.uniform(0.01, 1.0, 100), rng.uniform(-10, 10, 100)
    anti = np.max(np.abs(eval_f_polar(c, 3.3, rho, mu + 2 * np.pi) + eval_f_polar(c, 3.3, rho, mu)))
    parts["antiperiodic"] = anti < 1e-12

    # truncation stability on the reference shape, flux at the origin, k <= 8
    flux = FluxPosition(0.0, 0.0)
    a = find_levels(REFERENCE_SHAPE, flux, (1.0, 8.0), N=10).ks
    b = find_levels(REFERENCE_SHAPE, flux, (1.0, 8.0), N=14).ks
    trunc = np.max(np.abs(a - b)) if len(a) == len(b) else math.inf
    parts["truncation"] = trunc <= 1e-6

    # parallel runs give identical results
    serial = scan_grid(REFERENCE_SHAPE, 3, 0.1, workers=1, bbox=(-0.2, 0.2, -0.2, 0.2))
    parallel = scan_grid(REFERENCE_SHAPE, 3, 0.1, workers=2, bbox=(-0.2, 0.2, -0.2, 0.2))
    parts["determinism"] = np.array_equal(serial.gaps, parallel.gaps, equal_nan=True) and np.array_equal(
        serial.kmid, parallel.kmid, equal_nan=True)

    ok = all(parts.values())
    report(11, ok, f"recurrence residual {rec:.1e}, interlacing {inter}, antiperiodicity {anti:.1e}, "
                   f"N=10 vs N=14 max level difference {trunc:.1e} (required 1e-6), "
                   f"parallel determinism {parts['determinism']}")
