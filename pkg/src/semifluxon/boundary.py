"""Cubic conformal images of the unit circle and flux-centred coordinates."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ArgumentError, GeometryError

GEOMETRY_SAMPLES = 720
DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class ShapeParams:
    """Boundary x + iy = e^{i phi} + a2 e^{2 i phi} + a3 e^{3 i phi + i sigma}."""

    a2: float = 0.0
    a3: float = 0.0
    sigma: float = 0.0

    @property
    def is_circle(self) -> bool:
        return self.a2 == 0.0 and self.a3 == 0.0


CIRCLE = ShapeParams(0.0, 0.0, 0.0)
REFERENCE_SHAPE = ShapeParams(0.015, 0.05, math.pi / 3)
AFRICA_SHAPE = ShapeParams(0.2, 0.2, math.pi / 3)
# the shape whose degeneracy catalog is tabulated (area 3.34328)
TABLE_SHAPE = ShapeParams(0.15, 0.08, math.pi / 3)


@dataclass(frozen=True)
class FluxPosition:
    X: float
    Y: float

    @property
    def z(self) -> complex:
        return complex(self.X, self.Y)


@dataclass(frozen=True)
class FluxPolar:
    rho: float
    mu: float


_ANGLE_RE = re.compile(r"^\s*(-?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text) -> float:
    """Parse a float or a multiple of pi such as ``pi/3``, ``-2pi/5``, ``0.5*pi``."""
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE_RE.match(text.lower())
    if not m:
        raise ArgumentError(f"cannot parse angle {text!r}")
    coef = m.group(1)
    if coef in ("", "-"):
        coef += "1"
    value = float(coef) * math.pi
    if m.group(2):
        value /= float(m.group(2))
    return value


def boundary_complex(shape: ShapeParams, phi):
    """Boundary point(s) as complex numbers."""
    e = np.exp(1j * np.asarray(phi, dtype=float))
    return e + shape.a2 * e**2 + shape.a3 * e**3 * np.exp(1j * shape.sigma)


def boundary_derivative(shape: ShapeParams, phi):
    """d/dphi of the boundary curve, complex."""
    e = np.exp(1j * np.asarray(phi, dtype=float))
    return 1j * (e + 2 * shape.a2 * e**2 + 3 * shape.a3 * e**3 * np.exp(1j * shape.sigma))


def boundary_point(shape: ShapeParams, phi: float) -> tuple[float, float]:
    z = complex(boundary_complex(shape, phi))
    return z.real, z.imag


def flux_polar(shape: ShapeParams, phi: float, flux: FluxPosition) -> FluxPolar:
    """Polar coordinates of the boundary point at ``phi`` about the flux."""
    w = complex(boundary_complex(shape, phi)) - flux.z
    if abs(w) == 0.0:
        raise GeometryError("boundary point coincides with the flux position")
    return FluxPolar(abs(w), math.atan2(w.imag, w.real))


def flux_polar_many(shape: ShapeParams, phis, flux: FluxPosition):
    """Vectorised :func:`flux_polar`; returns arrays ``(rho, mu)``."""
    w = boundary_complex(shape, phis) - flux.z
    rho = np.abs(w)
    if np.any(rho == 0.0):
        raise GeometryError("boundary point coincides with the flux position")
    return rho, np.angle(w)


def collocation_angles(N: int) -> np.ndarray:
    """The 2N angles m pi / N, m = 1..2N."""
    if N < 1:
        raise ArgumentError("collocation truncation N must be >= 1")
    return np.arange(1, 2 * N + 1) * (np.pi / N)


@lru_cache(maxsize=256)
def arclength_angles(shape: ShapeParams, N: int) -> np.ndarray:
    """Parameters phi of 2N points equally spaced in arclength.

    The m-th point sits at arclength m L / 2N from phi = 0, so for the circle
    these are exactly the angles m pi / N.
    """
    angles = collocation_angles(N)
    if shape.is_circle:
        return angles
    phi = np.linspace(0.0, 2 * np.pi, 16 * 2048 + 1)
    speed = np.abs(boundary_derivative(shape, phi))
    s = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(phi))])
    return np.interp(angles / (2 * np.pi) * s[-1], s, phi)


def _segments_cross(z: np.ndarray) -> bool:
    """True if any two non-adjacent edges of the closed polygon ``z`` intersect."""
    a = z
    b = np.roll(z, -1)
    n = len(z)
    d = b - a

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    # orientation of every vertex pair against every edge, in blocks to bound memory
    for start in range(0, n, 128):
        i = np.arange(start, min(start + 128, n))[:, None]
        j = np.arange(n)[None, :]
        sep = (j - i) % n
        mask = (sep > 1) & (sep < n - 1)
        ai, di = a[i], d[i]
        aj, dj = a[j], d[j]
        o1 = cross(di, aj - ai)
        o2 = cross(di, aj + dj - ai)
        o3 = cross(dj, ai - aj)
        o4 = cross(dj, ai + di - aj)
        hit = (o1 * o2 < 0) & (o3 * o4 < 0) & mask
        if np.any(hit):
            return True
    return False


@lru_cache(maxsize=256)
def is_simple(shape: ShapeParams, samples: int = GEOMETRY_SAMPLES) -> bool:
    z = boundary_complex(shape, 2 * np.pi * np.arange(samples) / samples)
    if np.any(np.abs(boundary_derivative(shape, 2 * np.pi * np.arange(samples) / samples)) == 0):
        return False
    return not _segments_cross(z)


def validate_shape(shape: ShapeParams) -> None:
    if not is_simple(shape):
        raise GeometryError(f"boundary {shape} is self-intersecting")


def _quadrature(shape: ShapeParams, samples: int) -> tuple[float, float]:
    phi = 2 * np.pi * np.arange(samples) / samples
    z = boundary_complex(shape, phi)
    dz = boundary_derivative(shape, phi)
    w = 2 * np.pi / samples
    area = 0.5 * w * float(np.sum(z.real * dz.imag - z.imag * dz.real))
    length = w * float(np.sum(np.abs(dz)))
    return area, length


@lru_cache(maxsize=256)
def area_perimeter(shape: ShapeParams, tol: float = 1e-6) -> tuple[float, float]:
    """Area (Green's theorem) and perimeter (arclength) by periodic trapezoid rule.

    The sample count doubles from 720 until both change by less than ``tol``.
    """
    validate_shape(shape)
    samples = GEOMETRY_SAMPLES
    prev = _quadrature(shape, samples)
    while True:
        samples *= 2
        cur = _quadrature(shape, samples)
        if abs(cur[0] - prev[0]) < tol and abs(cur[1] - prev[1]) < tol:
            return cur
        if samples > 2**20:
            raise GeometryError("area/perimeter quadrature failed to converge")
        prev = cur


@lru_cache(maxsize=256)
def _polygon(shape: ShapeParams, samples: int) -> np.ndarray:
    return boundary_complex(shape, 2 * np.pi * np.arange(samples) / samples)


def winding_number(shape: ShapeParams, points, samples: int = GEOMETRY_SAMPLES) -> np.ndarray:
    """Winding number of the sampled boundary about each point (complex array)."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    poly = _polygon(shape, samples)
    out = np.empty(pts.shape, dtype=int)
    for start in range(0, pts.size, 2048):
        chunk = pts.ravel()[start : start + 2048, None]
        rel = poly[None, :] - chunk
        turn = np.angle(np.roll(rel, -1, axis=1) / rel)
        out.ravel()[start : start + 2048] = np.rint(turn.sum(axis=1) / (2 * np.pi)).astype(int)
    return out


def _nearest_parameter(shape: ShapeParams, p: complex, samples: int = 1024):
    phi = 2 * np.pi * np.arange(samples) / samples
    i = int(np.argmin(np.abs(_polygon(shape, samples) - p)))
    h = 2 * np.pi / samples
    res = minimize_scalar(lambda t: abs(complex(boundary_complex(shape, t)) - p),
                          bounds=(phi[i] - h, phi[i] + h), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


def contains(shape: ShapeParams, p) -> bool:
    """True iff ``p`` lies strictly inside the boundary.

    Winding number of the sampled polygon, except within a thin band of the
    curve where the polygon chords cut corners; there the side of the
    nearest boundary point's tangent decides.
    """
    z = complex(p[0], p[1]) if not isinstance(p, complex) else p
    if boundary_distance(shape, z, GEOMETRY_SAMPLES)[0] > 1e-3:
        return bool(winding_number(shape, z)[0] == 1)
    t, dist = _nearest_parameter(shape, z)
    if dist < 1e-12:
        return False  # on the curve
    tangent = complex(boundary_derivative(shape, t))
    offset = z - complex(boundary_complex(shape, t))
    # counter-clockwise curve: the interior is on the left of the tangent
    return bool((tangent.conjugate() * offset).imag > 0)


def boundary_distance(shape: ShapeParams, points, samples: int = 4096) -> np.ndarray:
    """Approximate distance from each point to the boundary curve."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    poly = _polygon(shape, samples)
    out = np.empty(pts.shape)
    for start in range(0, pts.size, 1024):
        chunk = pts.ravel()[start : start + 1024, None]
        out.ravel()[start : start + 1024] = np.abs(poly[None, :] - chunk).min(axis=1)
    return out


def is_admissible(shape: ShapeParams, flux: FluxPosition, margin: float = DEFAULT_MARGIN) -> bool:
    if not contains(shape, flux.z):
        return False
    return bool(boundary_distance(shape, flux.z)[0] >= margin)


def require_admissible(shape: ShapeParams, flux: FluxPosition, margin: float = DEFAULT_MARGIN) -> None:
    if not is_admissible(shape, flux, margin):
        raise GeometryError(
            f"flux position ({flux.X}, {flux.Y}) is not inside the boundary with clearance {margin}"
        )


def boundary_distance_exact(shape: ShapeParams, p: complex) -> float:
    """Distance from ``p`` to the boundary, polished by a bounded 1-D minimisation."""
    return _nearest_parameter(shape, p)[1]
