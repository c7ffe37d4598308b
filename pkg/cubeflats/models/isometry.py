from fractions import Fraction
from typing import Annotated, Literal, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cubeflats.utils.rationals import RationalMatrix, RationalVector, all_integral, identity_rows

BlockKind = Literal["LAMBDA", "B0", "B_STRICT"]


class RationalOrthoAffine(BaseModel):
    """Exact affine map x -> A x + b of R^n."""

    n: int = Field(..., ge=1, description="Dimension")
    A: RationalMatrix = Field(..., description="Linear part, rows of 'p/q' strings")
    b: RationalVector = Field(..., description="Translation part")

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {"n": 2, "A": [["-5/13", "12/13"], ["12/13", "5/13"]], "b": ["0", "0"]}
        }
    )

    @model_validator(mode="after")
    def _check_shape(self) -> "RationalOrthoAffine":
        if len(self.A) != self.n or any(len(row) != self.n for row in self.A):
            raise ValueError(f"A must be a {self.n}x{self.n} matrix")
        if len(self.b) != self.n:
            raise ValueError(f"b must have {self.n} entries")
        return self

    @classmethod
    def from_rows(cls, A: Sequence[Sequence], b: Sequence | None = None) -> "RationalOrthoAffine":
        n = len(A)
        return cls(n=n, A=tuple(tuple(row) for row in A), b=tuple(b) if b is not None else (0,) * n)

    @classmethod
    def identity(cls, n: int) -> "RationalOrthoAffine":
        return cls(n=n, A=identity_rows(n), b=(Fraction(0),) * n)

    def apply(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(sum((a * xi for a, xi in zip(row, x)), Fraction(0)) + bi for row, bi in zip(self.A, self.b))

    def linear(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(sum((a * xi for a, xi in zip(row, x)), Fraction(0)) for row in self.A)

    def compose(self, other: "RationalOrthoAffine") -> "RationalOrthoAffine":
        """self after other."""
        columns = list(zip(*other.A))
        A = tuple(tuple(sum((a * c for a, c in zip(row, col)), Fraction(0)) for col in columns) for row in self.A)
        return RationalOrthoAffine(n=self.n, A=A, b=self.apply(other.b))

    def inverse(self) -> "RationalOrthoAffine":
        """Inverse of an orthogonal map: x -> A^T x - A^T b."""
        At = tuple(zip(*self.A))
        shift = tuple(-sum((a * bi for a, bi in zip(row, self.b)), Fraction(0)) for row in At)
        return RationalOrthoAffine(n=self.n, A=At, b=shift)

    def has_integral_translation(self) -> bool:
        return all_integral(self.b)


class Block(BaseModel):
    """One diagonal block of the normal form, on original coordinates."""

    coordinates: tuple[int, ...] = Field(..., description="Original coordinates (1-based) in block order")
    kind: BlockKind
    matrix: RationalMatrix
    translation: RationalVector

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def size(self) -> int:
        return len(self.coordinates)


class BlockDecomposition(BaseModel):
    """Normal form Lambda + B0 + B_1 + ... + B_k with everything needed to undo it."""

    n: int
    permutation: tuple[int, ...] = Field(..., description="Position k of the normal form holds this original coordinate")
    integer_shift: tuple[int, ...] = Field(..., description="Integral vector subtracted from b")
    post_composition: tuple[tuple[int, ...], ...] = Field(..., description="Signed permutation Q applied after the shift")
    blocks: tuple[Block, ...]

    model_config = ConfigDict(frozen=True, extra="forbid")

    def blocks_of(self, kind: BlockKind) -> list[Block]:
        return [block for block in self.blocks if block.kind == kind]

    @property
    def lambda_rank(self) -> int:
        return len(self.blocks_of("LAMBDA"))

    def normalized_map(self) -> RationalOrthoAffine:
        """Block-diagonal map in normal-form coordinates."""
        M = [[Fraction(0)] * self.n for _ in range(self.n)]
        c = [Fraction(0)] * self.n
        start = 0
        for block in self.blocks:
            for i in range(block.size):
                c[start + i] = block.translation[i]
                for j in range(block.size):
                    M[start + i][start + j] = block.matrix[i][j]
            start += block.size
        return RationalOrthoAffine(n=self.n, A=tuple(map(tuple, M)), b=tuple(c))

    def reconstruct(self) -> RationalOrthoAffine:
        """Undo permutation, post-composition and shift: A = Q^T P^T M P, b = Q^T P^T c + s."""
        normal = self.normalized_map()
        n = self.n
        position = {coordinate - 1: k for k, coordinate in enumerate(self.permutation)}
        # M' = P^T M P back in original coordinates
        unpermuted = [[normal.A[position[i]][position[j]] for j in range(n)] for i in range(n)]
        unpermuted_b = [normal.b[position[i]] for i in range(n)]
        Qt = list(zip(*self.post_composition))
        A = tuple(
            tuple(sum((Qt[i][k] * unpermuted[k][j] for k in range(n)), Fraction(0)) for j in range(n))
            for i in range(n)
        )
        b = tuple(
            sum((Qt[i][k] * unpermuted_b[k] for k in range(n)), Fraction(0)) + self.integer_shift[i]
            for i in range(n)
        )
        return RationalOrthoAffine(n=n, A=A, b=b)


class HypersurfaceSpec(BaseModel):
    """Integer translate of the coordinate subspace on the free coordinates."""

    free_coordinates: tuple[int, ...]
    fixed_coordinates: tuple[int, ...]
    offset: tuple[int, ...] = Field(..., description="Integral values b2 taken on the fixed coordinates by the image of {x_fixed = 0}")

    model_config = ConfigDict(frozen=True, extra="forbid")


class HypersurfaceSplit(BaseModel):
    """A = A1 + A2 up to coordinate permutation, with b2 integral."""

    hypersurface: HypersurfaceSpec
    A1: RationalMatrix
    b1: RationalVector
    A2: RationalMatrix
    b2: RationalVector

    model_config = ConfigDict(frozen=True, extra="forbid")


class CubeSpec(BaseModel):
    """Unit cube of the standard cubulation: offset + span of the listed coordinates."""

    coordinates: tuple[int, ...] = Field(..., description="Spanning coordinates, 1-based, increasing")
    offset: tuple[int, ...] = Field(..., description="Integral corner")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def _check_coordinates(self) -> "CubeSpec":
        if list(self.coordinates) != sorted(set(self.coordinates)):
            raise ValueError("coordinates must be strictly increasing")
        if any(c < 1 or c > len(self.offset) for c in self.coordinates):
            raise ValueError("coordinates must lie in 1..n")
        return self

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def point(self, t: Sequence[Fraction]) -> tuple[Fraction, ...]:
        x = [Fraction(v) for v in self.offset]
        for coordinate, value in zip(self.coordinates, t):
            x[coordinate - 1] += value
        return tuple(x)


class Witness(BaseModel):
    """Point of an open cube whose image has more non-integral coordinates than the cube's dimension."""

    kind: Literal["witness"] = "witness"
    point: RationalVector
    image: RationalVector
    non_integral: int

    model_config = ConfigDict(frozen=True, extra="forbid")


class IntegralTranslate(BaseModel):
    """The cube is carried onto a cube of the cubulation."""

    kind: Literal["integral_translate"] = "integral_translate"
    shift: tuple[int, ...] = Field(..., description="Image corner minus cube corner")
    image: CubeSpec

    model_config = ConfigDict(frozen=True, extra="forbid")


TransverseResult = Annotated[Union[Witness, IntegralTranslate], Field(discriminator="kind")]
