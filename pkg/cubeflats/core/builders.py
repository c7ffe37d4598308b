import logging
from itertools import product
from typing import Hashable, Protocol, Sequence

from cubeflats.core.complex import face_label
from cubeflats.core.exceptions import PreconditionError
from cubeflats.models.complex import Cell, CubeComplex, FacetRef

logger = logging.getLogger(__name__)

Point = tuple[int, ...]
Directions = tuple[int, ...]

_PREFIX = {0: "v", 1: "e", 2: "q"}


def cell_name(base: Point, dirs: Directions, ambient: int) -> str:
    """'v0,0', 'e0,0/2', 'q0,0' in the plane; top cells omit their directions."""
    prefix = _PREFIX.get(len(dirs), "c")
    coords = ",".join(str(x) for x in base)
    if dirs and len(dirs) < ambient:
        return f"{prefix}{coords}/{''.join(str(d) for d in dirs)}"
    return f"{prefix}{coords}"


class CellResolver(Protocol):
    """Identifies cubes of a tiling of R^n that become one cell of the complex."""

    def canonical(self, base: Point, dirs: Directions, ctx: Hashable) -> tuple[Point, Directions, Hashable]: ...

    def cell_id(self, base: Point, dirs: Directions, ctx: Hashable) -> str: ...

    def face_context(self, base: Point, dirs: Directions, ctx: Hashable, direction: int, side: int) -> Hashable: ...


class PlainResolver:
    """No identifications: the standard cubulation itself."""

    def __init__(self, ambient: int):
        self.ambient = ambient

    def canonical(self, base, dirs, ctx):
        return base, dirs, ctx

    def cell_id(self, base, dirs, ctx):
        return cell_name(base, dirs, self.ambient)

    def face_context(self, base, dirs, ctx, direction, side):
        return ctx


class ComplexBuilder:
    """
    Assembles a cube complex out of unit cubes of R^n.

    A cube is given by its lowest corner, its increasing spanning directions and a
    resolver context (sheet, quarter plane, ...). Facet i of a cube with directions
    (d_1 < ... < d_k) is the cube with direction d_i removed, moved by e_{d_i} on
    the '+' side, so facet maps follow the precubical convention.
    """

    def __init__(self, ambient: int, resolver: CellResolver):
        self.ambient = ambient
        self.resolver = resolver
        self._cells: dict[str, Cell] = {}

    def add_cube(self, base: Sequence[int], dirs: Sequence[int], ctx: Hashable = None) -> str:
        base, dirs, ctx = self.resolver.canonical(tuple(base), tuple(sorted(dirs)), ctx)
        cell_id = self.resolver.cell_id(base, dirs, ctx)
        if cell_id in self._cells:
            return cell_id

        facets = []
        for axis, direction in enumerate(dirs, start=1):
            rest = tuple(d for d in dirs if d != direction)
            for side in (0, 1):
                moved = tuple(x + side if k == direction else x for k, x in enumerate(base, start=1))
                face_ctx = self.resolver.face_context(base, dirs, ctx, direction, side)
                facet_id = self.add_cube(moved, rest, face_ctx)
                facets.append(FacetRef(id=facet_id, face=face_label(axis, side)))
        self._cells[cell_id] = Cell(id=cell_id, dim=len(dirs), facets=tuple(facets))
        return cell_id

    def build(self, surface: bool = False) -> CubeComplex:
        dimension = max((cell.dim for cell in self._cells.values()), default=0)
        cells = tuple(self._cells[key] for key in sorted(self._cells))
        logger.debug(f"Built complex with {len(cells)} cells, dimension {dimension}")
        return CubeComplex(dimension=dimension, cells=cells, surface=surface)


def build_grid(shape: Sequence[int]) -> CubeComplex:
    """
    Grid patch of the standard cubulation with shape[i] top cubes along axis i.

    Cubes are centred on the origin: eleven squares per axis have lowest corners -5..5.
    """
    if not shape or any(size < 1 for size in shape):
        raise PreconditionError(f"grid shape must be positive, got {tuple(shape)}")
    ambient = len(shape)
    builder = ComplexBuilder(ambient, PlainResolver(ambient))
    ranges = [range(-(size // 2), size - size // 2) for size in shape]
    directions = tuple(range(1, ambient + 1))
    for base in product(*ranges):
        builder.add_cube(base, directions)
    logger.info(f"Generated {'x'.join(map(str, shape))} grid patch")
    return builder.build()
