import json
import logging
from collections import defaultdict
from itertools import combinations, product
from typing import Optional

from cubeflats.config import get_settings
from cubeflats.core.exceptions import InvalidComplexError, PreconditionError, UnknownCellError
from cubeflats.models.complex import Cell, CubeComplex, FacetRef
from cubeflats.models.schemas import ValidationReport, Violation
from cubeflats.utils.cache import get_cache_manager

logger = logging.getLogger(__name__)

# A position fixes some axes of a cube: ((axis, side), ...) with axes increasing, 1-based.
Position = tuple[tuple[int, int], ...]


def face_label(axis: int, side: int) -> str:
    return f"{'+' if side else '-'}{axis}"


def position_label(position: Position) -> str:
    return ",".join(face_label(axis, side) for axis, side in position)


class CellIndex:
    """Lookup structure over one complex: facet maps, faces of every cell and their incidences."""

    def __init__(self, complex_: CubeComplex):
        self.complex = complex_
        self.cells: dict[str, Cell] = {}
        self.facet_map: dict[str, dict[tuple[int, int], str]] = {}
        self._faces: dict[tuple[str, Position], str] = {}
        self._incidences: Optional[dict[str, list[tuple[str, Position]]]] = None
        for cell in complex_.cells:
            self.cells.setdefault(cell.id, cell)
            self.facet_map.setdefault(cell.id, {(f.axis, f.side): f.id for f in cell.facets})
        self.violations = _collect_violations(complex_, self)

    def require_valid(self) -> None:
        if self.violations:
            raise InvalidComplexError([f"{v.cell}: {v.kind}: {v.detail}" for v in self.violations])

    def cell(self, cell_id: str) -> Cell:
        try:
            return self.cells[cell_id]
        except KeyError:
            raise UnknownCellError(cell_id) from None

    def dim(self, cell_id: str) -> int:
        return self.cell(cell_id).dim

    def facet(self, cell_id: str, axis: int, side: int) -> str:
        return self.facet_map[cell_id][(axis, side)]

    def face(self, cell_id: str, position: Position) -> str:
        """The face of a cell where the axes of `position` are fixed; free axes keep their order."""
        if not position:
            return cell_id
        key = (cell_id, position)
        if key not in self._faces:
            (axis, side), rest = position[0], position[1:]
            head = self.facet(cell_id, axis, side)
            self._faces[key] = self.face(head, tuple((a - 1, s) for a, s in rest))
        return self._faces[key]

    def corner(self, cell_id: str, corner: tuple[int, ...]) -> str:
        return self.face(cell_id, tuple((axis, side) for axis, side in enumerate(corner, start=1)))

    def corners(self, cell_id: str) -> dict[tuple[int, ...], str]:
        return {eps: self.corner(cell_id, eps) for eps in product((0, 1), repeat=self.dim(cell_id))}

    def vertices_of(self, cell_id: str) -> set[str]:
        return set(self.corners(cell_id).values())

    def incidences(self, cell_id: str) -> list[tuple[str, Position]]:
        """Every (cell, position) pair whose face at that position is the given cell."""
        self.cell(cell_id)
        if self._incidences is None:
            self.require_valid()
            table: dict[str, list[tuple[str, Position]]] = defaultdict(list)
            for cell in self.complex.cells:
                for position in all_positions(cell.dim):
                    table[self.face(cell.id, position)].append((cell.id, position))
            self._incidences = dict(table)
        return self._incidences.get(cell_id, [])

    def cofaces(self, cell_id: str, codim: int = 1) -> list[tuple[str, Position]]:
        return [(e, p) for e, p in self.incidences(cell_id) if len(p) == codim]


def all_positions(dim: int) -> list[Position]:
    """All proper positions of a dim-cube: every non-empty set of fixed axes with its sides."""
    positions: list[Position] = []
    for size in range(1, dim + 1):
        for axes in combinations(range(1, dim + 1), size):
            for sides in product((0, 1), repeat=size):
                positions.append(tuple(zip(axes, sides)))
    return positions


def _collect_violations(complex_: CubeComplex, index: CellIndex) -> list[Violation]:
    violations: list[Violation] = []
    seen: set[str] = set()
    for cell in complex_.cells:
        if cell.id in seen:
            violations.append(Violation(cell=cell.id, kind="duplicate id", detail="id used by several cells"))
        seen.add(cell.id)

    sound: set[str] = set()
    for cell in complex_.cells:
        before = len(violations)
        if cell.dim > complex_.dimension:
            violations.append(Violation(
                cell=cell.id, kind="dimension", detail=f"dim {cell.dim} exceeds complex dimension {complex_.dimension}"
            ))
        if len(cell.facets) != 2 * cell.dim:
            violations.append(Violation(
                cell=cell.id, kind="facet count", detail=f"expected {2 * cell.dim} facets, found {len(cell.facets)}"
            ))
        labels = [(f.axis, f.side) for f in cell.facets]
        if any(axis > cell.dim for axis, _ in labels) or len(set(labels)) != len(labels):
            violations.append(Violation(
                cell=cell.id, kind="face label", detail="faces must be distinct and name axes 1..dim"
            ))
        for ref in cell.facets:
            target = index.cells.get(ref.id)
            if target is None:
                violations.append(Violation(cell=cell.id, kind="unknown facet", detail=f"facet {ref.id} does not exist"))
            elif target.dim != cell.dim - 1:
                violations.append(Violation(
                    cell=cell.id, kind="facet dimension", detail=f"facet {ref.id} has dim {target.dim}"
                ))
        if len(violations) == before:
            sound.add(cell.id)

    for cell in complex_.cells:
        if cell.dim < 2 or cell.id not in sound:
            continue
        if not all(ref.id in sound for ref in cell.facets):
            continue
        for i, j in combinations(range(1, cell.dim + 1), 2):
            for eps, eta in product((0, 1), repeat=2):
                via_i = index.facet(index.facet(cell.id, i, eps), j - 1, eta)
                via_j = index.facet(index.facet(cell.id, j, eta), i, eps)
                if via_i != via_j:
                    violations.append(Violation(
                        cell=cell.id,
                        kind="cubical identity",
                        detail=f"faces {face_label(i, eps)} and {face_label(j, eta)} meet in {via_i} and {via_j}"
                    ))
    return violations


def cell_index(complex_: CubeComplex) -> CellIndex:
    """Cached CellIndex for a complex (keyed by content)."""
    cache = get_cache_manager()
    cached = cache.get(kind="cell_index", complex=complex_)
    if cached is not None:
        return cached
    index = CellIndex(complex_)
    cache.set(index, kind="cell_index", complex=complex_)
    return index


def validate(complex_: CubeComplex) -> ValidationReport:
    """Structural check of a complex. Never raises; the report lists every violation."""
    index = cell_index(complex_)
    if index.violations:
        logger.warning(f"Complex failed validation with {len(index.violations)} violation(s)")
    return ValidationReport(valid=not index.violations, violations=tuple(index.violations))


def ensure_valid(complex_: CubeComplex) -> CellIndex:
    index = cell_index(complex_)
    index.require_valid()
    return index


def require_vertex(index: CellIndex, cell_id: str) -> None:
    if index.dim(cell_id) != 0:
        raise PreconditionError(f"{cell_id} is not a vertex")


def canonicalize(complex_: CubeComplex) -> CubeComplex:
    """Cells sorted by id, facets sorted by axis then side."""
    cells = tuple(
        Cell(id=c.id, dim=c.dim, facets=tuple(sorted(c.facets, key=lambda f: (f.axis, f.side))))
        for c in sorted(complex_.cells, key=lambda c: c.id)
    )
    return CubeComplex(dimension=complex_.dimension, cells=cells, surface=complex_.surface)


def load_complex(text: str) -> CubeComplex:
    return CubeComplex.model_validate_json(text)


def dump_complex(complex_: CubeComplex, indent: Optional[int] = None) -> str:
    """Canonical JSON text; the surface marker appears only when set."""
    payload = canonicalize(complex_).model_dump(mode="json", exclude={"surface"} if not complex_.surface else None)
    return json.dumps(payload, indent=get_settings().JSON_INDENT if indent is None else indent)


def make_cell(cell_id: str, dim: int, facets: dict[str, str]) -> Cell:
    """Cell from a face-label -> facet-id mapping, e.g. {"-1": "a", "+1": "b"}."""
    return Cell(id=cell_id, dim=dim, facets=tuple(FacetRef(id=fid, face=label) for label, fid in facets.items()))
