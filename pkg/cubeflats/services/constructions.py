import logging
import math
from collections import defaultdict, deque
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import networkx as nx
import sympy
from networkx.algorithms.isomorphism import categorical_multiedge_match

from cubeflats.config import get_settings
from cubeflats.core.builders import ComplexBuilder, cell_name
from cubeflats.core.exceptions import PreconditionError
from cubeflats.models.isometry import RationalOrthoAffine
from cubeflats.models.schemas import CoverResult, CoverSpec, FilledPoint, LiftReport, PythagoreanPair, TorusComplex
from cubeflats.utils import permutations as perm
from cubeflats.utils import words
from cubeflats.utils.cache import get_cache_manager
from cubeflats.utils.rationals import from_matrix, to_matrix

logger = logging.getLogger(__name__)

Vector = tuple[int, int]
HALF = Fraction(1, 2)


# ==============================================================================
# PYTHAGOREAN DOUBLES
# ==============================================================================

def find_pythagorean_doubles(limit: int) -> list[PythagoreanPair]:
    """
    Equal-norm integral pairs that are not signed permutations of each other,
    coordinates bounded by `limit` in magnitude, one pair per pair of classes.
    """
    if limit < 1:
        raise PreconditionError(f"limit must be at least 1, got {limit}")

    cache_params = {"kind": "pythagorean_doubles", "limit": limit}

    # 1. Memo table check
    cache = get_cache_manager()
    cached = cache.get(**cache_params)
    if cached is not None:
        return list(cached)

    # 2. Group sorted |coordinate| classes by norm
    classes: dict[int, list[Vector]] = defaultdict(list)
    for p in range(limit + 1):
        for q in range(p, limit + 1):
            if q:
                classes[p * p + q * q].append((p, q))

    pairs = []
    for norm in sorted(classes):
        for (p1, q1), (p2, q2) in combinations(sorted(classes[norm]), 2):
            pairs.append(PythagoreanPair(a=(p1, q1), b=(q2, p2), norm_squared=norm))

    # 3. Memoize the immutable result
    cache.set(tuple(pairs), **cache_params)
    logger.info(f"Found {len(pairs)} Pythagorean double(s) with coordinates up to {limit}")
    return pairs


def swap_isometry(pair: PythagoreanPair) -> RationalOrthoAffine:
    """Reflection R = I - 2 u u^T / |u|^2 with u = a - b, exchanging a and b."""
    a = sympy.Matrix(pair.a)
    b = sympy.Matrix(pair.b)
    u = a - b
    R = sympy.eye(2) - 2 * (u * u.T) / (u.T * u)[0, 0]
    if R * a != b or R * b != a:
        raise RuntimeError(f"reflection fails to exchange {pair.a} and {pair.b}")
    return RationalOrthoAffine.from_rows(from_matrix(R))


def _lattice_matrix(a: Sequence[int], b: Sequence[int]) -> sympy.Matrix:
    M = sympy.Matrix([[a[0], b[0]], [a[1], b[1]]])
    if M.det() == 0:
        raise PreconditionError(f"lattice vectors {tuple(a)} and {tuple(b)} are linearly dependent")
    return M


def verify_descends(T: RationalOrthoAffine, a: Sequence[int], b: Sequence[int]) -> bool:
    """The linear part maps the lattice <a, b> bijectively onto itself."""
    if T.n != 2:
        raise PreconditionError("lattice descent is defined for plane isometries")
    M = _lattice_matrix(a, b)
    C = M.inv() * to_matrix(T.A) * M
    return all(x.is_integer for x in C) and abs(C.det()) == 1


# ==============================================================================
# TORI AND BRANCHED COVERS
# ==============================================================================

# Offsets around a lattice point and the detours to the reference square centre (1/2, 1/2)
_REFERENCE = (HALF, HALF)
_ROUTES = {
    (HALF, HALF): [],
    (-HALF, HALF): [_REFERENCE],
    (HALF, -HALF): [_REFERENCE],
    (-HALF, -HALF): [(HALF, -HALF), _REFERENCE],
    (HALF, Fraction(0)): [_REFERENCE],
    (Fraction(0), HALF): [_REFERENCE],
    (-HALF, Fraction(0)): [(-HALF, HALF), _REFERENCE],
    (Fraction(0), -HALF): [(HALF, -HALF), _REFERENCE],
}
_LOOP = [(-HALF, HALF), (-HALF, -HALF), (HALF, -HALF), _REFERENCE]


class LatticeSheets:
    """
    Sheet bookkeeping for a cover of R^2 / <a, b> branched over the lattice points.

    A point x = alpha a + beta b lies in the lattice translate (floor alpha, floor beta).
    Sheets are labelled relative to that translate; crossing alpha = j upwards
    applies sigma_a, crossing beta = k upwards applies sigma_b.
    """

    def __init__(self, a: Vector, b: Vector, spec: CoverSpec):
        self.a = a
        self.b = b
        self.det = a[0] * b[1] - a[1] * b[0]
        if self.det == 0:
            raise PreconditionError(f"lattice vectors {a} and {b} are linearly dependent")
        self.spec = spec
        self.moves = {
            "a": (spec.sigma_a, perm.inverse(spec.sigma_a)),
            "b": (spec.sigma_b, perm.inverse(spec.sigma_b)),
        }
        self.monodromy = tuple(self._around_lattice_point(s) for s in range(1, spec.degree + 1))

    def coords(self, x: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
        alpha = Fraction(x[0] * self.b[1] - x[1] * self.b[0], self.det)
        beta = Fraction(self.a[0] * x[1] - self.a[1] * x[0], self.det)
        return alpha, beta

    def translate_of(self, x: Sequence[Fraction]) -> tuple[int, int]:
        alpha, beta = self.coords(x)
        return math.floor(alpha), math.floor(beta)

    def is_lattice_point(self, z: Sequence[int]) -> bool:
        alpha, beta = self.coords([Fraction(v) for v in z])
        return alpha.denominator == 1 and beta.denominator == 1

    def transport(self, start: Sequence[Fraction], end: Sequence[Fraction], sheet: int) -> int:
        """Sheet reached by following the segment start -> end; it must avoid lattice points."""
        events: list[tuple[Fraction, tuple[int, ...]]] = []
        for v0, v1, name in zip(self.coords(start), self.coords(end), ("a", "b")):
            up, down = self.moves[name]
            f0, f1 = math.floor(v0), math.floor(v1)
            if f1 > f0:
                events.extend(((j - v0) / (v1 - v0), up) for j in range(f0 + 1, f1 + 1))
            elif f1 < f0:
                events.extend(((j - v0) / (v1 - v0), down) for j in range(f1 + 1, f0 + 1))
        events.sort(key=lambda event: event[0])
        times = [t for t, _ in events]
        if len(set(times)) != len(times):
            raise RuntimeError(f"segment {tuple(start)} -> {tuple(end)} passes through a lattice point")
        for _, sigma in events:
            sheet = sigma[sheet - 1]
        return sheet

    def _follow(self, base: Sequence[Fraction], offsets, start, sheet: int) -> int:
        current = start
        for offset in offsets:
            target = tuple(c + o for c, o in zip(base, offset))
            sheet = self.transport(current, target, sheet)
            current = target
        return sheet

    def _around_lattice_point(self, sheet: int) -> int:
        origin = (Fraction(0), Fraction(0))
        return self._follow(origin, _LOOP, _REFERENCE, sheet)

    def reference_sheet(self, lattice_point: Sequence[int], offset: tuple[Fraction, Fraction], sheet: int) -> int:
        """Sheet at lattice_point + (1/2, 1/2) reached from lattice_point + offset without circling it."""
        base = tuple(Fraction(v) for v in lattice_point)
        start = tuple(c + o for c, o in zip(base, offset))
        return self._follow(base, _ROUTES[offset], start, sheet)

    def filled_points(self) -> list[tuple[int, ...]]:
        return perm.cycles(self.monodromy)


def _center(base: Sequence[int], dirs: Sequence[int]) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) + (HALF if k in dirs else 0) for k, x in enumerate(base, start=1))


class CoverResolver:
    """Cells of the cover: (representative cube of the fundamental domain, sheet); lattice vertices become filled points."""

    def __init__(self, sheets: LatticeSheets):
        self.sheets = sheets
        self.filled = {s: min(cycle) for cycle in sheets.filled_points() for s in cycle}

    def canonical(self, base, dirs, ctx):
        if not dirs and self.sheets.is_lattice_point(base):
            return (0, 0), dirs, ctx
        m, k = self.sheets.translate_of(_center(base, dirs))
        a, b = self.sheets.a, self.sheets.b
        return (base[0] - m * a[0] - k * b[0], base[1] - m * a[1] - k * b[1]), dirs, ctx

    def cell_id(self, base, dirs, ctx):
        name = cell_name(base, dirs, 2)
        return f"{name}@{ctx}" if self.sheets.spec.degree > 1 else name

    def face_context(self, base, dirs, sheet, direction, side):
        start = _center(base, dirs)
        face_base = tuple(x + side if k == direction else x for k, x in enumerate(base, start=1))
        face_dirs = tuple(d for d in dirs if d != direction)
        if not face_dirs and self.sheets.is_lattice_point(face_base):
            offset = tuple(c - v for c, v in zip(start, face_base))
            return self.filled[self.sheets.reference_sheet(face_base, offset, sheet)]
        return self.sheets.transport(start, _center(face_base, face_dirs), sheet)


def fundamental_squares(a: Vector, b: Vector) -> list[Vector]:
    """Lower corners of the unit squares whose centre lies in the half-open parallelogram [0,1) a + [0,1) b."""
    sheets = LatticeSheets(a, b, CoverSpec(degree=1, sigma_a=(1,), sigma_b=(1,)))
    corners = [(0, 0), a, b, (a[0] + b[0], a[1] + b[1])]
    xs = range(min(c[0] for c in corners) - 1, max(c[0] for c in corners) + 1)
    ys = range(min(c[1] for c in corners) - 1, max(c[1] for c in corners) + 1)
    return [(x, y) for x in xs for y in ys if sheets.translate_of(_center((x, y), (1, 2))) == (0, 0)]


def _build_cover(a: Vector, b: Vector, spec: CoverSpec) -> CoverResult:
    sheets = LatticeSheets(a, b, spec)
    resolver = CoverResolver(sheets)
    builder = ComplexBuilder(2, resolver)
    squares = fundamental_squares(a, b)
    for base in squares:
        for sheet in range(1, spec.degree + 1):
            builder.add_cube(base, (1, 2), sheet)
    surface = builder.build(surface=True)

    filled = [
        FilledPoint(vertex=resolver.cell_id((0, 0), (), min(cycle)), sheets=cycle, cone_order=4 * len(cycle))
        for cycle in sheets.filled_points()
    ]
    chi = surface.euler_characteristic()
    expected = -sum(len(point.sheets) - 1 for point in filled)
    if chi != expected:
        raise RuntimeError(f"Riemann-Hurwitz fails: chi = {chi}, expected {expected}")
    logger.info(
        f"Built degree-{spec.degree} cover of the ({a}, {b}) torus: "
        f"{len(squares) * spec.degree} squares, chi = {chi}, monodromy {perm.format_cycles(sheets.monodromy)}"
    )
    return CoverResult(
        surface=surface,
        spec=spec,
        commutator=sheets.monodromy,
        filled_points=tuple(filled),
        euler_characteristic=chi
    )


def build_torus(a: Sequence[int], b: Sequence[int]) -> TorusComplex:
    """Square complex R^2 / <a, b>; it has |det(a b)| squares."""
    a, b = (int(a[0]), int(a[1])), (int(b[0]), int(b[1]))
    _lattice_matrix(a, b)
    result = _build_cover(a, b, CoverSpec(degree=1, sigma_a=(1,), sigma_b=(1,)))
    return TorusComplex(surface=result.surface, a=a, b=b, squares=result.surface.count(2))


def branched_cover(torus: TorusComplex, spec: CoverSpec) -> CoverResult:
    """
    Degree-d cover of the torus punctured at its lattice vertex, determined by the
    sheet permutations, with the punctures filled. Filled points are the cycles of
    the local monodromy (conjugate to the commutator of sigma_a and sigma_b).
    """
    if not perm.is_transitive([spec.sigma_a, spec.sigma_b]):
        raise PreconditionError("sigma_a and sigma_b do not act transitively: the cover is disconnected")
    return _build_cover(torus.a, torus.b, spec)


# ==============================================================================
# LIFTING AUTOMORPHISMS
# ==============================================================================

def _nielsen_moves(u: words.Word, v: words.Word) -> list[tuple[words.Word, words.Word]]:
    r = words.free_reduce
    iu, iv = words.invert(u), words.invert(v)
    return [
        (r(u + v), v), (r(u + iv), v), (r(v + u), v), (r(iv + u), v),
        (u, r(v + u)), (u, r(v + iu)), (u, r(u + v)), (u, r(iu + v)),
        (iu, v), (u, iv), (v, u),
    ]


def automorphism_inverse(images: tuple[words.Word, words.Word]) -> tuple[words.Word, words.Word]:
    """
    Inverse of the endomorphism a -> images[0], b -> images[1] of F(a, b).

    Nielsen moves that never lengthen the pair are searched breadth-first until the
    pair becomes (a, b); the same moves applied to (a, b) give the inverse.
    """
    settings = get_settings()
    u0, v0 = (words.free_reduce(w) for w in images)
    if len(u0) > settings.WORD_SEARCH_BOUND or len(v0) > settings.WORD_SEARCH_BOUND:
        raise PreconditionError(f"words longer than {settings.WORD_SEARCH_BOUND} letters are not searched")
    if not u0 or not v0:
        raise PreconditionError("an empty image word never defines an automorphism")

    target = ((1,), (2,))
    queue = deque([((u0, v0), target)])
    seen = {(u0, v0)}
    while queue:
        (u, v), (x, y) = queue.popleft()
        if (u, v) == target:
            inverse = (x, y)
            if words.substitute(x, (u0, v0)) != (1,) or words.substitute(u0, inverse) != (1,):
                raise RuntimeError("inverse search produced a non-inverse")
            return inverse
        length = len(u) + len(v)
        for (nu, nv), (nx_, ny) in zip(_nielsen_moves(u, v), _nielsen_moves(x, y)):
            if not nu or not nv or len(nu) + len(nv) > length or (nu, nv) in seen:
                continue
            seen.add((nu, nv))
            queue.append(((nu, nv), (nx_, ny)))
        if len(seen) > settings.NIELSEN_STATE_LIMIT:
            raise PreconditionError(f"no inverse found within {settings.NIELSEN_STATE_LIMIT} states")
    raise PreconditionError("the words do not define an automorphism of the free group")


def evaluate_word(word: Sequence[int], sigma_a: perm.Permutation, sigma_b: perm.Permutation) -> perm.Permutation:
    """Action of a word on sheets, letters applied left to right."""
    result = perm.identity(len(sigma_a))
    for letter in word:
        sigma = sigma_a if abs(letter) == 1 else sigma_b
        result = perm.compose(result, sigma if letter > 0 else perm.inverse(sigma))
    return result


def lift_report(spec: CoverSpec, images: tuple[str, str]) -> LiftReport:
    """
    Decides whether the automorphism a -> w_a, b -> w_b lifts to the cover: the
    representation precomposed with it must be the same action up to relabelling
    sheets, tested by isomorphism of the labelled Schreier graphs.
    """
    if not perm.is_transitive([spec.sigma_a, spec.sigma_b]):
        raise PreconditionError("sigma_a and sigma_b do not act transitively")
    try:
        w_a, w_b = (words.parse_word(text) for text in images)
    except ValueError as e:
        raise PreconditionError(str(e)) from None

    (pa, pb), (qa, qb) = words.exponent_sums(w_a), words.exponent_sums(w_b)
    determinant = pa * qb - pb * qa
    if abs(determinant) != 1:
        raise PreconditionError(f"abelianization has determinant {determinant}; not an automorphism")
    inverse = automorphism_inverse((w_a, w_b))

    original = perm.schreier_graph({"a": spec.sigma_a, "b": spec.sigma_b})
    twisted = perm.schreier_graph({
        "a": evaluate_word(w_a, spec.sigma_a, spec.sigma_b),
        "b": evaluate_word(w_b, spec.sigma_a, spec.sigma_b),
    })
    lifts = nx.is_isomorphic(original, twisted, edge_match=categorical_multiedge_match("label", None))
    logger.info(f"Automorphism ({words.format_word(w_a)}, {words.format_word(w_b)}) lifts: {lifts}")
    return LiftReport(
        lifts=lifts,
        images=(words.format_word(w_a), words.format_word(w_b)),
        inverse=(words.format_word(inverse[0]), words.format_word(inverse[1])),
        abelianization_determinant=determinant
    )


def lift_check(spec: CoverSpec, images: tuple[str, str]) -> bool:
    return lift_report(spec, images).lifts
