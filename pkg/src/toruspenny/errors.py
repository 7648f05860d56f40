"""Exception hierarchy shared by all toruspenny modules."""

from __future__ import annotations


class TorusPennyError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(TorusPennyError, ValueError):
    pass


class DegenerateConfigurationError(InvalidInputError):
    pass


class DegeneratePairError(DegenerateConfigurationError):
    """Two points coincide on the torus where distinct points are required."""

    def __init__(self, i: int | None = None, j: int | None = None, message: str | None = None):
        self.pair = (i, j)
        if message is None:
            if i is None:
                message = "points coincide on the torus"
            else:
                message = f"points {i} and {j} coincide on the torus"
        super().__init__(message)


class ModeError(InvalidInputError):
    """Exact-mode operation requested on non-rational data."""


class CatalogError(InvalidInputError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class MalformedDrawingError(InvalidInputError):
    pass


class StructureError(TorusPennyError):
    """Initial guess is incompatible with the requested contact structure."""


class ConvergenceError(TorusPennyError):
    pass
