from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cubeflats.models.complex import CubeComplex, SimplicialComplex
from cubeflats.models.isometry import BlockDecomposition, HypersurfaceSplit, RationalOrthoAffine


class Violation(BaseModel):
    """One broken structural rule."""

    cell: str = Field(..., description="Offending cell id")
    kind: str = Field(..., description="Rule name, e.g. 'facet count'")
    detail: str = Field(..., description="Human-readable explanation")

    model_config = ConfigDict(frozen=True, extra="forbid")


class ValidationReport(BaseModel):
    valid: bool
    violations: tuple[Violation, ...] = ()

    model_config = ConfigDict(frozen=True, extra="forbid")


class NpcReport(BaseModel):
    """Gromov link condition verdict. CAT(0) additionally needs simple connectivity."""

    npc: bool = Field(..., description="Every vertex link is a flag simplicial complex")
    offending_vertices: tuple[str, ...] = Field(default=(), description="Sorted vertices failing the condition")
    non_simplicial: tuple[str, ...] = Field(default=(), description="Vertices whose link is not simplicial")
    non_flag: tuple[str, ...] = Field(default=(), description="Vertices whose link has an unspanned clique")
    vertex_count: int = 0

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {"npc": False, "offending_vertices": ["o"], "non_simplicial": [], "non_flag": ["o"], "vertex_count": 7}
        }
    )


class JoinDecomposition(BaseModel):
    sphere: SimplicialComplex = Field(..., description="Sigma_{n-1}, the sphere of directions inside the cell")
    residual: SimplicialComplex = Field(..., description="Ascending link of the cell")

    model_config = ConfigDict(frozen=True, extra="forbid")


class LinkReport(BaseModel):
    link: SimplicialComplex
    is_flag: bool
    join_decomposition: Optional[JoinDecomposition] = None

    model_config = ConfigDict(frozen=True, extra="forbid")


# ==============================================================================
# DEVELOPMENT
# ==============================================================================

class Chart(BaseModel):
    """Corner assignment of an n-cube onto origin + [0,1]^n.

    Local coordinate j is sent to global axis axes[j] with orientation signs[j]:
    x -> origin + sum_j (x_j if signs[j] > 0 else 1 - x_j) e_{axes[j]}.
    """

    cell: str
    origin: tuple[int, ...]
    axes: tuple[int, ...] = Field(..., description="Global axis (1-based) of each local coordinate")
    signs: tuple[int, ...] = Field(..., description="+1 or -1 per local coordinate")
    parent: Optional[str] = Field(default=None, description="Cube this chart was extended from")
    via: Optional[str] = Field(default=None, pattern=r"^[+-][1-9][0-9]*$", description="Face of the parent crossed")
    depth: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_isometry(self) -> "Chart":
        n = len(self.axes)
        if len(self.origin) != n or len(self.signs) != n:
            raise ValueError("origin, axes and signs must have the same length")
        if sorted(self.axes) != list(range(1, n + 1)):
            raise ValueError(f"axes must be a permutation of 1..{n}")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        return self

    @classmethod
    def standard(cls, cell: str, origin: tuple[int, ...]) -> "Chart":
        """Identity corner labelling placed at `origin`."""
        n = len(origin)
        return cls(cell=cell, origin=origin, axes=tuple(range(1, n + 1)), signs=(1,) * n)

    def same_placement(self, other: "Chart") -> bool:
        return (self.origin, self.axes, self.signs) == (other.origin, other.axes, other.signs)

    def point(self, x) -> tuple:
        """Image of a local point of [0,1]^n."""
        image = list(self.origin)
        for value, axis, sign in zip(x, self.axes, self.signs):
            image[axis - 1] += value if sign > 0 else 1 - value
        return tuple(image)


class FrontierCell(BaseModel):
    cell: str = Field(..., description="Facet where development stopped")
    reason: Literal["radius", "boundary", "hypersurface", "branching"]

    model_config = ConfigDict(frozen=True, extra="forbid")


class SphereClass(BaseModel):
    """Classification of a link M_p."""

    kind: Literal["StandardSphere", "Circle", "NotASphere"]
    dimension: int = Field(..., description="m, the expected sphere dimension")
    cycle_length: Optional[int] = Field(default=None, description="k for Circle(k)")
    counts: tuple[int, ...] = Field(default=(), description="Simplex counts F_0..F_m")
    violations: tuple[str, ...] = ()

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def label(self) -> str:
        if self.kind == "Circle":
            return f"Circle({self.cycle_length})"
        if self.kind == "StandardSphere":
            return f"StandardSphere({self.dimension})"
        return "NotASphere"


class DevelopmentResult(BaseModel):
    seed: str
    dimension: int
    radius: int
    charts: dict[str, Chart] = Field(..., description="Charted n-cubes keyed by cell id")
    branch_vertices: tuple[str, ...] = ()
    interior_vertices: tuple[str, ...] = ()
    link_class: dict[str, SphereClass] = Field(default_factory=dict)
    frontier: tuple[FrontierCell, ...] = ()
    seams: tuple[str, ...] = Field(default=(), description="Facets between charted cubes with incompatible charts")
    residual_link: SimplicialComplex = Field(default_factory=SimplicialComplex)

    model_config = ConfigDict(frozen=True, extra="forbid")


class IdentityCheck(BaseModel):
    name: str
    lhs: int
    rhs: int
    relation: Literal["==", ">="]
    holds: bool

    model_config = ConfigDict(frozen=True, extra="forbid")


class IdentityReport(BaseModel):
    m: int
    counts: tuple[int, ...]
    checks: tuple[IdentityCheck, ...]

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def all_hold(self) -> bool:
        return all(check.holds for check in self.checks)

    def failed(self) -> list[str]:
        return [check.name for check in self.checks if not check.holds]


class Factor(BaseModel):
    coordinates: tuple[int, ...]
    dimension: int
    kind: Literal["B0", "B_STRICT"]
    standard: bool = Field(..., description="False when the factor is 2-dimensional and may carry cone points")

    model_config = ConfigDict(frozen=True, extra="forbid")


class FactorSpec(BaseModel):
    """K_C = [0,1]^l x K_0 x ... x K_k."""

    l: int
    factors: tuple[Factor, ...]

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def dimensions(self) -> tuple[int, ...]:
        return tuple(f.dimension for f in self.factors)


class AnalysisReport(BaseModel):
    isometry: RationalOrthoAffine
    cubical: bool
    normal_form: BlockDecomposition
    hypersurface: Optional[HypersurfaceSplit] = None
    product_structure: Optional[FactorSpec] = None

    model_config = ConfigDict(frozen=True, extra="forbid")


# ==============================================================================
# CONE SURFACES
# ==============================================================================

class GaussBonnetReport(BaseModel):
    euler_characteristic: int
    curvature_sum: int = Field(..., description="Sum over vertices of 4 - k_v")
    holds: bool

    model_config = ConfigDict(frozen=True, extra="forbid")


class ConeReport(BaseModel):
    cone_orders: dict[str, int]
    cone_angles: dict[str, str] = Field(..., description="Cone angle of each vertex as a multiple of pi")
    singular_vertices: tuple[str, ...]
    euler_characteristic: int
    curvature_sum: int
    orientable: bool
    genus: Optional[int] = Field(default=None, description="Genus of a connected orientable surface")
    classification: Literal["Euclidean", "QiHyperbolicPlane", "Invalid"]

    model_config = ConfigDict(frozen=True, extra="forbid")


class SymmetryReport(BaseModel):
    n: int
    automorphism_group: str
    automorphism_order: Optional[int] = Field(..., description="Order of Aut; None when the group is infinite")
    isometry_group: str
    point_group_order: int = Field(..., description="Automorphisms fixing the apex, enumerated on the patch")
    enumerated: int = Field(..., description="Automorphisms found on the patch")
    patch_radius: int
    closed_under_composition: bool
    closed_under_inverse: bool
    fixes_apex: bool

    model_config = ConfigDict(frozen=True, extra="forbid")


# ==============================================================================
# CONSTRUCTIONS
# ==============================================================================

class PythagoreanPair(BaseModel):
    """Two integral vectors of equal norm that are not signed permutations of each other."""

    a: tuple[int, int]
    b: tuple[int, int]
    norm_squared: int

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_pair(self) -> "PythagoreanPair":
        if self.a[0] ** 2 + self.a[1] ** 2 != self.norm_squared or self.b[0] ** 2 + self.b[1] ** 2 != self.norm_squared:
            raise ValueError("a and b must both have the stated squared norm")
        if sorted(map(abs, self.a)) == sorted(map(abs, self.b)):
            raise ValueError("a and b differ by a signed permutation")
        if self.a[0] * self.b[1] - self.a[1] * self.b[0] == 0:
            raise ValueError("a and b are linearly dependent")
        return self


class TorusComplex(BaseModel):
    surface: CubeComplex
    a: tuple[int, int]
    b: tuple[int, int]
    squares: int

    model_config = ConfigDict(frozen=True, extra="forbid")


class CoverSpec(BaseModel):
    """Permutation representation of the punctured-torus group on `degree` sheets (one-line notation)."""

    degree: int = Field(..., ge=1)
    sigma_a: tuple[int, ...]
    sigma_b: tuple[int, ...]

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={"example": {"degree": 3, "sigma_a": [2, 1, 3], "sigma_b": [1, 3, 2]}}
    )

    @model_validator(mode="after")
    def _check_permutations(self) -> "CoverSpec":
        for name, sigma in (("sigma_a", self.sigma_a), ("sigma_b", self.sigma_b)):
            if sorted(sigma) != list(range(1, self.degree + 1)):
                raise ValueError(f"{name} is not a permutation of 1..{self.degree}")
        return self


class FilledPoint(BaseModel):
    vertex: str
    sheets: tuple[int, ...] = Field(..., description="Commutator cycle through these sheets")
    cone_order: int

    model_config = ConfigDict(frozen=True, extra="forbid")


class CoverResult(BaseModel):
    surface: CubeComplex
    spec: CoverSpec
    commutator: tuple[int, ...]
    filled_points: tuple[FilledPoint, ...]
    euler_characteristic: int

    model_config = ConfigDict(frozen=True, extra="forbid")


class LiftReport(BaseModel):
    lifts: bool
    images: tuple[str, str] = Field(..., description="Words w_a, w_b")
    inverse: tuple[str, str] = Field(..., description="Words of the inverse automorphism")
    abelianization_determinant: int

    model_config = ConfigDict(frozen=True, extra="forbid")


# ==============================================================================
# CLI ERRORS
# ==============================================================================

class ErrorResponse(BaseModel):
    """Standardized error shape printed on stderr."""

    detail: str = Field(..., description="Error message")
    exit_code: int = Field(..., description="Process exit status")
    errors: Optional[list[str]] = Field(None, description="Individual violations, when available")

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"detail": "not orthogonal: A^T A != I", "exit_code": 1, "errors": None}}
    )
