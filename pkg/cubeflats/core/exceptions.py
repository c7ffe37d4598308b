from typing import Sequence


class CubeFlatsError(Exception):
    """Base class for every error raised by cubeflats."""


class InputError(CubeFlatsError, ValueError):
    """Malformed or inconsistent input data."""


class InvalidComplexError(InputError):
    """A cube complex failed structural validation."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        preview = "; ".join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid cube complex: {preview}{more}")


class UnknownCellError(InputError):
    """A cell id does not occur in the complex."""

    def __init__(self, cell_id: str):
        self.cell_id = cell_id
        super().__init__(f"unknown cell id {cell_id!r}")


class InvalidSurfaceError(InputError):
    """A 2-complex is not a closed square surface."""


class PreconditionError(CubeFlatsError, ValueError):
    """An operation was invoked outside its precondition."""


class VerdictError(CubeFlatsError):
    """A negative verdict that stops the requested computation."""


class NotOrthogonalError(VerdictError, ValueError):
    """The linear part of a map is not orthogonal."""


class CubicalTraceError(VerdictError):
    """The trace is a cubical map, so there is nothing to develop."""


class NpcViolationError(VerdictError):
    """A vertex link is not a flag simplicial complex."""

    def __init__(self, vertices: Sequence[str]):
        self.vertices = sorted(vertices)
        super().__init__(f"link condition fails at {', '.join(self.vertices)}")


class SearchBoundError(CubeFlatsError, RuntimeError):
    """A bounded search finished without a result."""
