from itertools import combinations
from typing import Iterable

from pydantic import BaseModel, ConfigDict, Field, model_validator

FACE_PATTERN = r"^[+-][1-9][0-9]*$"


class FacetRef(BaseModel):
    """One facet of a cell: the facet's id and the model-cube face it occupies."""

    id: str = Field(..., min_length=1, description="Id of the (dim-1)-cell glued in")
    face: str = Field(..., pattern=FACE_PATTERN, description="Signed coordinate: '-i' is x_i = 0, '+i' is x_i = 1")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def axis(self) -> int:
        return int(self.face[1:])

    @property
    def side(self) -> int:
        return 1 if self.face[0] == "+" else 0


class Cell(BaseModel):
    """A k-cube together with its 2k facet attachments."""

    id: str = Field(..., min_length=1, description="Unique cell id")
    dim: int = Field(..., ge=0, description="Dimension of the model cube")
    facets: tuple[FacetRef, ...] = Field(default=(), description="Facet attachments, any order")

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "id": "q0,0",
                "dim": 2,
                "facets": [
                    {"id": "e0,0/2", "face": "-1"},
                    {"id": "e1,0/2", "face": "+1"},
                    {"id": "e0,0/1", "face": "-2"},
                    {"id": "e0,1/1", "face": "+2"}
                ]
            }
        }
    )


class CubeComplex(BaseModel):
    """Finite cube complex given as a face poset with precubical facet maps."""

    dimension: int = Field(..., ge=0, description="Top dimension of the complex")
    cells: tuple[Cell, ...] = Field(..., description="All cells, sorted by id on output")
    surface: bool = Field(default=False, description="Marks closed square surfaces")

    model_config = ConfigDict(frozen=True, extra="forbid")

    def cells_of_dim(self, dim: int) -> list[Cell]:
        return [cell for cell in self.cells if cell.dim == dim]

    def count(self, dim: int) -> int:
        return sum(1 for cell in self.cells if cell.dim == dim)

    def euler_characteristic(self) -> int:
        return sum((-1) ** cell.dim for cell in self.cells)


class SimplicialComplex(BaseModel):
    """Finite abstract simplicial complex, stored with every non-empty simplex."""

    vertices: tuple[str, ...] = Field(default=(), description="Vertex ids, sorted")
    simplices: tuple[tuple[str, ...], ...] = Field(default=(), description="All simplices as sorted vertex tuples")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_closure(self) -> "SimplicialComplex":
        present = set(self.simplices)
        known = set(self.vertices)
        for simplex in self.simplices:
            if len(set(simplex)) != len(simplex):
                raise ValueError(f"simplex {simplex} repeats a vertex")
            if not set(simplex) <= known:
                raise ValueError(f"simplex {simplex} uses unknown vertices")
            if len(simplex) > 1:
                for face in combinations(simplex, len(simplex) - 1):
                    if face not in present:
                        raise ValueError(f"face {face} of {simplex} is missing")
        for vertex in self.vertices:
            if (vertex,) not in present:
                raise ValueError(f"vertex {vertex} has no 0-simplex")
        return self

    @classmethod
    def from_maximal(cls, faces: Iterable[Iterable[str]], vertices: Iterable[str] = ()) -> "SimplicialComplex":
        """Downward closure of the given faces, in canonical order."""
        closure: set[tuple[str, ...]] = set()
        for face in faces:
            simplex = tuple(sorted(set(face)))
            for size in range(1, len(simplex) + 1):
                closure.update(combinations(simplex, size))
        closure.update((v,) for v in vertices)
        ordered = tuple(sorted(closure, key=lambda s: (len(s), s)))
        return cls(vertices=tuple(sorted(s[0] for s in ordered if len(s) == 1)), simplices=ordered)

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def is_empty(self) -> bool:
        return not self.simplices

    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dimension + 1)
        for simplex in self.simplices:
            counts[len(simplex) - 1] += 1
        return tuple(counts)

    def maximal_simplices(self) -> list[tuple[str, ...]]:
        covered = {
            face
            for simplex in self.simplices if len(simplex) > 1
            for face in combinations(simplex, len(simplex) - 1)
        }
        return [simplex for simplex in self.simplices if simplex not in covered]

    def simplices_of_dim(self, dim: int) -> list[tuple[str, ...]]:
        return [s for s in self.simplices if len(s) == dim + 1]
