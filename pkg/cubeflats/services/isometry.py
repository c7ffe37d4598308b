import logging
import math
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import networkx as nx
import sympy

from cubeflats.config import get_settings
from cubeflats.core.exceptions import InputError, NotOrthogonalError, PreconditionError, SearchBoundError
from cubeflats.models.isometry import (
    Block,
    BlockDecomposition,
    CubeSpec,
    HypersurfaceSpec,
    HypersurfaceSplit,
    IntegralTranslate,
    RationalOrthoAffine,
    Witness,
)
from cubeflats.models.schemas import Factor, FactorSpec
from cubeflats.utils.cache import get_cache_manager
from cubeflats.utils.rationals import (
    all_integral,
    common_denominator,
    from_matrix,
    is_integral,
    parse_rational,
    round_half_toward_zero,
    to_matrix,
)

logger = logging.getLogger(__name__)


# ==============================================================================
# BASIC PREDICATES
# ==============================================================================

def check_orthogonal(A: Sequence[Sequence]) -> bool:
    """Exact test of A^T A = I."""
    n = len(A)
    if n == 0 or any(len(row) != n for row in A):
        raise InputError("orthogonality needs a non-empty square matrix")
    M = to_matrix([[parse_rational(x) for x in row] for row in A])
    return M.T * M == sympy.eye(n)


def require_orthogonal(T: RationalOrthoAffine) -> RationalOrthoAffine:
    if not check_orthogonal(T.A):
        raise NotOrthogonalError("not orthogonal: A^T A != I")
    return T


def reduce_translation(T: RationalOrthoAffine) -> tuple[RationalOrthoAffine, tuple[int, ...]]:
    """
    Subtracts the nearest integer vector from b (half-integers round toward zero).

    Reduced entries lie in [-1/2, 1/2] and integral entries become 0.
    """
    shift = tuple(round_half_toward_zero(x) for x in T.b)
    reduced = tuple(x - s for x, s in zip(T.b, shift))
    return RationalOrthoAffine(n=T.n, A=T.A, b=reduced), shift


def is_signed_permutation(A: Sequence[Sequence[Fraction]]) -> bool:
    n = len(A)
    if any(x not in (-1, 0, 1) for row in A for x in row):
        return False
    return all(sum(1 for x in row if x) == 1 for row in A) and all(
        sum(1 for i in range(n) if A[i][j]) == 1 for j in range(n)
    )


def is_cubical_map(T: RationalOrthoAffine) -> bool:
    """T lies in Z^n x| O(n, Z)."""
    return is_signed_permutation(T.A) and T.has_integral_translation()


def pattern_components(A: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Connected components (0-based, sorted) of the nonzero pattern of A, ordered by smallest coordinate."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(A)))
    graph.add_edges_from((i, j) for i, row in enumerate(A) for j, x in enumerate(row) if x and i != j)
    return sorted((sorted(component) for component in nx.connected_components(graph)), key=lambda c: c[0])


def _submatrix(A, rows: Sequence[int], cols: Sequence[int]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(A[i][j] for j in cols) for i in rows)


# ==============================================================================
# HYPERSURFACES AND NORMAL FORM
# ==============================================================================

def preserves_proper_hypersurface(T: RationalOrthoAffine) -> Optional[HypersurfaceSplit]:
    """
    Finds A = A1 + A2 (block sum up to coordinate permutation) with b2 integral.

    The fixed coordinates of the split form the smallest pattern component with
    integral translation (ties go to the component holding the highest coordinate).
    The hypersurface {x_fixed = 0} is carried to {x_fixed = b2}.
    """
    components = pattern_components(T.A)
    integral = [c for c in components if all(is_integral(T.b[i]) for i in c)]
    if len(components) < 2 or not integral:
        return None

    fixed = min(integral, key=lambda c: (len(c), -max(c)))
    free = [i for i in range(T.n) if i not in fixed]
    spec = HypersurfaceSpec(
        free_coordinates=tuple(i + 1 for i in free),
        fixed_coordinates=tuple(i + 1 for i in fixed),
        offset=tuple(int(T.b[i]) for i in fixed)
    )
    return HypersurfaceSplit(
        hypersurface=spec,
        A1=_submatrix(T.A, free, free),
        b1=tuple(T.b[i] for i in free),
        A2=_submatrix(T.A, fixed, fixed),
        b2=tuple(T.b[i] for i in fixed)
    )


def normal_form(T: RationalOrthoAffine) -> BlockDecomposition:
    """
    Block normal form Lambda + B0 + B_1 + ... + B_k.

    Integral cubical components are diagonalized by post-composing with the
    transpose of their permutation pattern and split into 1x1 LAMBDA blocks.
    Components with non-integral translation are grouped into a single B0 block
    whose translation is reduced. Integral non-cubical components become B_STRICT
    blocks with zero translation.
    """
    n = T.n
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    shift = [0] * n
    lambdas: list[int] = []
    b0: list[int] = []
    strict: list[list[int]] = []

    for component in pattern_components(T.A):
        block = _submatrix(T.A, component, component)
        translation_integral = all(is_integral(T.b[i]) for i in component)
        if not translation_integral:
            b0.extend(component)
            for i in component:
                shift[i] = round_half_toward_zero(T.b[i])
        elif is_signed_permutation(block):
            for i in component:
                shift[i] = int(T.b[i])
                for j in component:
                    Q[i][j] = int(T.A[j][i] != 0)
            lambdas.extend(component)
        else:
            for i in component:
                shift[i] = int(T.b[i])
            strict.append(component)

    QA = [[sum((Q[i][k] * T.A[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
    residual = [T.b[i] - shift[i] for i in range(n)]
    Qb = [sum((Q[i][k] * residual[k] for k in range(n)), Fraction(0)) for i in range(n)]

    def make_block(coordinates: Sequence[int], kind: str) -> Block:
        return Block(
            coordinates=tuple(i + 1 for i in coordinates),
            kind=kind,
            matrix=_submatrix(QA, coordinates, coordinates),
            translation=tuple(Qb[i] for i in coordinates)
        )

    blocks = [make_block([i], "LAMBDA") for i in sorted(lambdas)]
    if b0:
        blocks.append(make_block(sorted(b0), "B0"))
    blocks.extend(make_block(component, "B_STRICT") for component in strict)

    permutation = tuple(c for block in blocks for c in block.coordinates)
    return BlockDecomposition(
        n=n,
        permutation=permutation,
        integer_shift=tuple(shift),
        post_composition=tuple(tuple(row) for row in Q),
        blocks=tuple(blocks)
    )


def product_structure(tau: RationalOrthoAffine) -> FactorSpec:
    """K_C = [0,1]^l x K_0 x ... x K_k read off the normal form; 2-dimensional factors may carry cone points."""
    if is_cubical_map(tau):
        raise PreconditionError("cubical map: the trace has no non-trivial product structure")
    decomposition = normal_form(tau)
    factors = [
        Factor(coordinates=block.coordinates, dimension=block.size, kind=block.kind, standard=block.size != 2)
        for kind in ("B0", "B_STRICT")
        for block in decomposition.blocks_of(kind)
    ]
    return FactorSpec(l=decomposition.lambda_rank, factors=tuple(factors))


# ==============================================================================
# TRANSVERSALITY
# ==============================================================================

def _check_cube(T: RationalOrthoAffine, cube: CubeSpec) -> None:
    if len(cube.offset) != T.n:
        raise InputError(f"cube lives in dimension {len(cube.offset)}, map in dimension {T.n}")
    if not 1 <= cube.dim <= T.n - 1:
        raise PreconditionError(f"cube dimension {cube.dim} outside 1..{T.n - 1}")


def transverse_rank(T: RationalOrthoAffine, cube: CubeSpec) -> int:
    """
    Number of image coordinates that are non-integral at a generic point of the open cube.

    A coordinate counts when it varies over the cube or is constant with a non-integral value.
    """
    corner = T.apply([Fraction(v) for v in cube.offset])
    rank = 0
    for i in range(T.n):
        varies = any(T.A[i][s - 1] for s in cube.coordinates)
        if varies or not is_integral(corner[i]):
            rank += 1
    return rank


def _non_integral(values: Sequence[Fraction]) -> int:
    return sum(1 for v in values if v.denominator != 1)


def _grid_witness(T: RationalOrthoAffine, cube: CubeSpec) -> Witness:
    """Searches t = k/q for the cube centre first, then grids q = 2D+1, 4D+3, ..."""
    d = cube.dim
    D = common_denominator([x for row in T.A for x in row] + list(T.b))
    grids = [2]
    q = 2 * D + 1
    for _ in range(get_settings().WITNESS_GRID_ESCALATIONS + 1):
        grids.append(q)
        q = 2 * q + 1

    for q in grids:
        for ks in product(range(1, q), repeat=d):
            point = cube.point([Fraction(k, q) for k in ks])
            image = T.apply(point)
            count = _non_integral(image)
            if count > d:
                logger.debug(f"Witness found on grid 1/{q}: {count} non-integral coordinates")
                return Witness(point=point, image=image, non_integral=count)
    raise SearchBoundError(f"no transverse point found on grids up to 1/{grids[-1]}")


def transverse_witness(T: RationalOrthoAffine, cube: CubeSpec) -> Witness:
    """Point of the open cube whose image has more non-integral coordinates than the cube's dimension."""
    _check_cube(T, cube)
    if preserves_proper_hypersurface(T) is not None:
        raise PreconditionError("the map preserves a proper hypersurface; no transversality is guaranteed")
    if transverse_rank(T, cube) <= cube.dim:
        raise SearchBoundError("image of the cube lies in a hypersurface")
    return _grid_witness(T, cube)


def general_transverse(T: RationalOrthoAffine, cube: CubeSpec) -> Witness | IntegralTranslate:
    """
    Witness when the image leaves every hypersurface; otherwise the cube lies in
    L x p with T(0 x p) integral and is carried onto an integral translate.

    A cube whose image stays in a hypersurface without landing on a cube of the
    cubulation has neither outcome. That happens when a spanning direction is not
    carried to a coordinate direction, or when the corner lands off the lattice,
    and raises PreconditionError.
    """
    _check_cube(T, cube)
    if transverse_rank(T, cube) > cube.dim:
        return _grid_witness(T, cube)

    corner = T.apply([Fraction(v) for v in cube.offset])
    targets: list[tuple[int, int]] = []
    for s in cube.coordinates:
        column = [T.A[i][s - 1] for i in range(T.n)]
        nonzero = [i for i, x in enumerate(column) if x]
        if len(nonzero) != 1 or column[nonzero[0]] not in (1, -1):
            raise PreconditionError(f"direction e{s} is not carried to a coordinate direction")
        targets.append((nonzero[0], int(column[nonzero[0]])))
    if not all_integral(corner):
        raise PreconditionError("the cube corner is carried to a non-integral point")

    image_offset = [int(x) for x in corner]
    for i, sign in targets:
        if sign < 0:
            image_offset[i] -= 1
    image = CubeSpec(coordinates=tuple(sorted(i + 1 for i, _ in targets)), offset=tuple(image_offset))
    return IntegralTranslate(
        shift=tuple(a - b for a, b in zip(image_offset, cube.offset)),
        image=image
    )


# ==============================================================================
# LATTICE POINTS AND GENERATORS
# ==============================================================================

def enumerate_integral_points(
        n: int,
        radius=None,
        *,
        radius_squared=None
) -> tuple[tuple[int, ...], ...]:
    """All z in Z^n with |z|^2 <= D^2, compared exactly. Give the radius D or its square."""
    if (radius is None) == (radius_squared is None):
        raise PreconditionError("give exactly one of radius and radius_squared")
    bound = parse_rational(radius) ** 2 if radius is not None else parse_rational(radius_squared)
    if bound < 0 or (radius is not None and parse_rational(radius) < 0):
        raise PreconditionError("radius must be non-negative")

    cache_params = {"kind": "integral_points", "n": n, "bound": str(bound)}

    # 1. Memo table check
    cache = get_cache_manager()
    cached = cache.get(**cache_params)
    if cached is not None:
        return cached

    # 2. Exhaustive scan of the bounding box
    m = math.isqrt(math.floor(bound))
    points = tuple(
        z for z in product(range(-m, m + 1), repeat=n) if sum(x * x for x in z) <= bound
    )

    # 3. Memoize the immutable tuple
    cache.set(points, **cache_params)
    return points


def sphere_points(n: int, norm_squared: int) -> tuple[tuple[int, ...], ...]:
    """Integral points with |z|^2 exactly norm_squared."""
    return tuple(
        z for z in enumerate_integral_points(n, radius_squared=norm_squared)
        if sum(x * x for x in z) == norm_squared
    )


def cayley_transform(S: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Rational orthogonal matrix (I - S)(I + S)^-1 from a rational skew-symmetric S."""
    M = to_matrix([[parse_rational(x) for x in row] for row in S])
    if M.T != -M:
        raise InputError("Cayley transform needs a skew-symmetric matrix")
    identity = sympy.eye(M.rows)
    return from_matrix((identity - M) * (identity + M).inv())
