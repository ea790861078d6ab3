"""Quantum billiards threaded by a half-quantum flux line.

Submodules: ``specfun`` (Bessel functions), ``boundary`` (shapes),
``spectral`` (collocation eigenproblem), ``circle`` (exact circle
spectrum), ``degeneracy`` (diabolical points), ``nodal_force`` (nodal
lines and forces), ``weyl`` (level counting) and ``cli``.
"""

__version__ = "0.1.0"

from .boundary import AFRICA_SHAPE, CIRCLE, REFERENCE_SHAPE, TABLE_SHAPE, FluxPosition, ShapeParams
from .errors import (
    ArgumentError,
    DomainError,
    GeometryError,
    NotAnEigenvalueError,
    SemifluxonError,
    StencilError,
    TracingError,
    UndefinedDirectionError,
    WindowError,
)
from .spectral import LevelList, find_levels, mode_coefficients

__all__ = [
    "__version__",
    "ShapeParams",
    "FluxPosition",
    "CIRCLE",
    "REFERENCE_SHAPE",
    "TABLE_SHAPE",
    "AFRICA_SHAPE",
    "LevelList",
    "find_levels",
    "mode_coefficients",
    "SemifluxonError",
    "ArgumentError",
    "DomainError",
    "GeometryError",
    "NotAnEigenvalueError",
    "WindowError",
    "StencilError",
    "UndefinedDirectionError",
    "TracingError",
]
