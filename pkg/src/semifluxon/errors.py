"""Exception hierarchy shared by the numerical modules.

Each class carries the CLI exit code it maps to.
"""


class SemifluxonError(Exception):
    exit_code = 1


class ArgumentError(SemifluxonError, ValueError):
    """Caller supplied an invalid argument (empty range, bad index...)."""

    exit_code = 2


class DomainError(ArgumentError):
    """Special-function argument outside its domain."""


class GeometryError(SemifluxonError):
    """Invalid shape, or a flux position that is not admissible."""

    exit_code = 3


class NotAnEigenvalueError(SemifluxonError):
    exit_code = 3


class WindowError(SemifluxonError):
    """Level tracking lost inside a k window; the caller should widen it."""

    exit_code = 3


class StencilError(SemifluxonError):
    """A level crossing falls inside a finite-difference stencil."""

    exit_code = 3


class UndefinedDirectionError(SemifluxonError):
    """The n = 0 amplitude vanishes so no nodal direction is defined."""

    exit_code = 3


class TracingError(SemifluxonError):
    """Nodal-line march did not reach the boundary."""

    exit_code = 4

    def __init__(self, message, polyline=None):
        super().__init__(message)
        self.polyline = polyline
