"""Nodal line leaving the semifluxon and the force on the flux.

Close to the flux the real wavefunction behaves as

    f ~ e_0 J_{1/2}(k rho) cos(mu / 2 + chi_0),

so exactly one nodal line leaves the flux, in the direction mu = pi - 2 chi_0.
The force -grad_R E on the flux is directed along that line and tends to
shorten it; here the direction is compared with a finite-difference gradient
of the level energy.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import boundary as geo
from .boundary import FluxPosition, ShapeParams
from .errors import ArgumentError, StencilError, TracingError, UndefinedDirectionError
from .degeneracy import GapSettings, levels_at
from .spectral import ModeCoefficients, eval_f_polar, eval_f_xy, mode_coefficients

START_RADIUS = 1e-3
TRACE_STEP = 1e-2
MIN_TRACE_STEP = 2.5e-4
END_TOL = 1e-3
MAX_STEPS = 10_000
FD_STEP = 1e-3
RICHARDSON_TOL = 0.01
FORCE_N = 14


@dataclass
class NodalInfo:
    chi0: float
    mu_nodal: float
    e0: float
    polyline: np.ndarray  # complex vertices, flux first

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.polyline.real, self.polyline.imag])


@dataclass
class ForceEstimate:
    nodal_direction: np.ndarray
    hf_gradient: np.ndarray
    alignment_cos: float
    k: float
    mu_nodal: float
    richardson_rel: float

    def record(self) -> dict:
        return {
            "nodal_direction": [float(v) for v in self.nodal_direction],
            "hf_gradient": [float(v) for v in self.hf_gradient],
            "alignment_cos": self.alignment_cos,
            "k": self.k,
            "mu_nodal": self.mu_nodal,
            "richardson_rel": self.richardson_rel,
        }


def chi0_from_coefficients(coeffs: ModeCoefficients) -> tuple[float, float]:
    """(e_0, chi_0) of the lowest angular order."""
    c0, s0 = float(coeffs.c[0]), float(coeffs.s[0])
    e0 = math.hypot(c0, s0)
    scale = float(np.max(coeffs.e))
    if e0 == 0.0 or e0 <= 1e-12 * scale:
        raise UndefinedDirectionError("lowest-order coefficient vanishes: higher-order zero at the flux")
    return e0, math.atan2(-s0, c0)


def nodal_angle(chi0: float) -> float:
    """pi - 2 chi_0 reduced to [0, 2 pi)."""
    return (math.pi - 2.0 * chi0) % (2.0 * math.pi)


def count_nodal_lines(coeffs: ModeCoefficients, flux: FluxPosition, k: float,
                      radius: float = 1e-2, samples: int = 720) -> int:
    """Sign changes of f on a small circle round the flux.

    The circuit runs over mu in [0, 2 pi] and f changes sign on closing it,
    so the count is odd.
    """
    mu = 2 * np.pi * np.arange(samples + 1) / samples
    z = flux.z + radius * np.exp(1j * mu)
    f = eval_f_polar(coeffs, k, np.abs(z - flux.z), mu)
    return int(np.sum(np.sign(f[:-1]) * np.sign(f[1:]) < 0))


class _Field:
    """f on the branch continued along the traced line."""

    def __init__(self, coeffs, flux, k):
        self.coeffs, self.flux, self.k = coeffs, flux, k

    def angle(self, z: complex, mu_ref: float) -> float:
        mu = math.atan2((z - self.flux.z).imag, (z - self.flux.z).real)
        return mu_ref + math.remainder(mu - mu_ref, 2 * math.pi)

    def __call__(self, z: complex, mu_ref: float) -> float:
        return float(eval_f_xy(self.coeffs, self.flux, self.k, z, mu_ref))


def _field_scale(shape, coeffs, flux, k) -> float:
    """max |f| over a coarse interior sample."""
    t = np.linspace(-1.0, 1.0, 41)
    z = (t[None, :] + 1j * t[:, None]).ravel() * 1.5
    z = z[geo.winding_number(shape, z) == 1]
    return float(np.max(np.abs(eval_f_xy(coeffs, flux, k, z))))


def _correct(field: _Field, q: complex, normal: complex, half_width: float, mu_ref: float):
    """Zero of f on the segment q + s normal closest to s = 0, or None."""
    for width in (half_width, 2 * half_width, 4 * half_width):
        s = np.linspace(-width, width, 9)
        vals = np.array([field(q + si * normal, mu_ref) for si in s])
        changes = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
        if changes.size:
            i = min(changes, key=lambda i: abs(s[i] + s[i + 1]))
            if vals[i] == 0.0:
                return q + s[i] * normal
            root = brentq(lambda t: field(q + t * normal, mu_ref), s[i], s[i + 1], xtol=1e-14)
            return q + root * normal
    return None


def trace_nodal(
    coeffs: ModeCoefficients,
    flux: FluxPosition,
    k: float,
    shape: ShapeParams,
    step: float = TRACE_STEP,
    max_steps: int = MAX_STEPS,
) -> NodalInfo:
    """March along f = 0 from the flux to the boundary.

    Predictor: a step along the last chord.  Corrector: root of f along the
    normal.  Near the boundary the step is halved until a predictor would
    leave the domain with the current point within END_TOL of the boundary.
    """
    if step <= 0:
        raise ArgumentError("trace step must be positive")
    e0, chi0 = chi0_from_coefficients(coeffs)
    mu0 = nodal_angle(chi0)
    field = _Field(coeffs, flux, k)
    direction = complex(math.cos(mu0), math.sin(mu0))
    mu_ref = mu0
    start = flux.z + START_RADIUS * direction
    first = _correct(field, start, 1j * direction, 0.25 * START_RADIUS, mu_ref)
    pts = [flux.z, first if first is not None else start]
    mu_ref = field.angle(pts[-1], mu_ref)
    h = step
    for _ in range(max_steps):
        p = pts[-1]
        q = p + h * direction
        nxt = None
        if geo.contains(shape, q):
            nxt = _correct(field, q, 1j * direction, 0.5 * h, field.angle(q, mu_ref))
            if nxt is not None and not geo.contains(shape, nxt):
                nxt = None
        if nxt is None:
            if geo.boundary_distance_exact(shape, p) < END_TOL:
                return NodalInfo(chi0, mu0, e0, np.array(pts))
            if h <= MIN_TRACE_STEP:
                raise TracingError("nodal line lost before reaching the boundary", np.array(pts))
            h *= 0.5
            continue
        chord = nxt - p
        direction = chord / abs(chord)
        mu_ref = field.angle(nxt, mu_ref)
        pts.append(nxt)
        if geo.boundary_distance_exact(shape, nxt) < END_TOL:
            return NodalInfo(chi0, mu0, e0, np.array(pts))
        h = min(step, 2 * h)
    raise TracingError(f"nodal march exceeded {max_steps} steps", np.array(pts))


def nodal_info(shape: ShapeParams, flux: FluxPosition, k: float, N: int = FORCE_N) -> NodalInfo:
    return trace_nodal(mode_coefficients(shape, flux, k, N), flux, k, shape)


# ---------------------------------------------------------------------- force


def _level_k(args) -> np.ndarray:
    shape, X, Y, n_levels, N = args
    return levels_at(shape, FluxPosition(X, Y), n_levels, GapSettings(N=N))


def _stencil(shape, flux, level, h, N, workers):
    offsets = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)]
    jobs = [(shape, flux.X + dx, flux.Y + dy, level + 1, N) for dx, dy in offsets]
    for _, X, Y, _, _ in jobs:
        geo.require_admissible(shape, FluxPosition(X, Y))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            ks = list(pool.map(_level_k, jobs))
    else:
        ks = [_level_k(j) for j in jobs]
    for kk in ks:
        if level > 1 and kk[level - 1] - kk[level - 2] < 10 * h:
            raise StencilError(f"level {level} approaches level {level - 1} inside the stencil")
        if kk[level] - kk[level - 1] < 10 * h:
            raise StencilError(f"level {level} approaches level {level + 1} inside the stencil")
    E = [kk[level - 1] ** 2 for kk in ks]
    return -np.array([(E[0] - E[1]) / (2 * h), (E[2] - E[3]) / (2 * h)])


def force(
    shape: ShapeParams,
    flux: FluxPosition,
    level_index: int,
    fd_step: float = FD_STEP,
    N: int = FORCE_N,
    workers: int = 1,
) -> ForceEstimate:
    """Nodal-line direction against the finite-difference force -grad_R k^2.

    The level must be separated from its neighbours by more than 10 fd_step
    at the flux and at every stencil point, and the gradients at fd_step and
    2 fd_step must agree to RICHARDSON_TOL.
    """
    if level_index < 1:
        raise ArgumentError("level index must be >= 1")
    if fd_step <= 0:
        raise ArgumentError("fd_step must be positive")
    ks = levels_at(shape, flux, level_index + 1, GapSettings(N=N))
    k = float(ks[level_index - 1])
    lower = k - ks[level_index - 2] if level_index > 1 else math.inf
    if min(lower, ks[level_index] - k) < 10 * fd_step:
        raise StencilError(f"level {level_index} is (nearly) degenerate at ({flux.X}, {flux.Y})")
    grad = _stencil(shape, flux, level_index, fd_step, N, workers)
    grad2 = _stencil(shape, flux, level_index, 2 * fd_step, N, workers)
    rel = float(np.linalg.norm(grad - grad2) / max(np.linalg.norm(grad), 1e-300))
    if rel > RICHARDSON_TOL:
        raise StencilError(f"finite-difference gradient not converged (relative change {rel:.2e})")
    coeffs = mode_coefficients(shape, flux, k, N)
    _, chi0 = chi0_from_coefficients(coeffs)
    mu = nodal_angle(chi0)
    nodal = np.array([math.cos(mu), math.sin(mu)])
    cos = float(np.dot(grad, nodal) / np.linalg.norm(grad))
    return ForceEstimate(nodal, grad, max(-1.0, min(1.0, cos)), k, mu, rel)


__all__ = [
    "NodalInfo",
    "ForceEstimate",
    "chi0_from_coefficients",
    "nodal_angle",
    "count_nodal_lines",
    "trace_nodal",
    "nodal_info",
    "force",
]
