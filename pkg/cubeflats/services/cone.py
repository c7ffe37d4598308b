import logging
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Sequence

import networkx as nx

from cubeflats.config import get_settings
from cubeflats.core.builders import ComplexBuilder, cell_name
from cubeflats.core.complex import CellIndex, Position, ensure_valid
from cubeflats.core.exceptions import InvalidSurfaceError, PreconditionError
from cubeflats.core.links import complex_automorphisms, corner_simplex
from cubeflats.models.complex import CubeComplex
from cubeflats.models.schemas import ConeReport, GaussBonnetReport, SymmetryReport
from cubeflats.services.isometry import sphere_points
from cubeflats.utils.rationals import format_rational

logger = logging.getLogger(__name__)

APEX = "apex"


# ==============================================================================
# CONE PLANES
# ==============================================================================

class ConeResolver:
    """
    n quarter planes Q_0..Q_{n-1}, each a copy of [0, inf)^2, with the x-axis of
    Q_j glued to the y-axis of Q_{j-1}. Cells on a glued axis are stored on the
    y-axis side; the common corner is the apex.
    """

    def __init__(self, n: int):
        self.n = n

    def canonical(self, base, dirs, quarter):
        if base == (0, 0) and not dirs:
            return base, dirs, None
        x, y = base
        if y == 0 and 2 not in dirs:
            return (0, x), tuple(2 for _ in dirs), (quarter - 1) % self.n
        return base, dirs, quarter

    def cell_id(self, base, dirs, quarter):
        if quarter is None:
            return APEX
        return f"Q{quarter}.{cell_name(base, dirs, 2)}"

    def face_context(self, base, dirs, quarter, direction, side):
        return quarter


def build_cone_plane(n: int, radius: int) -> CubeComplex:
    """Patch of Cone(R^2, n): radius x radius squares in each of n quarter planes around the apex."""
    if n < 4:
        raise PreconditionError(f"cone order {n} is below 4; the link condition fails at the apex")
    if radius < 1:
        raise PreconditionError(f"radius must be at least 1, got {radius}")
    builder = ComplexBuilder(2, ConeResolver(n))
    for quarter in range(n):
        for x in range(radius):
            for y in range(radius):
                builder.add_cube((x, y), (1, 2), quarter)
    logger.info(f"Generated Cone(R^2,{n}) patch of radius {radius}")
    return builder.build()


# ==============================================================================
# SQUARE SURFACES
# ==============================================================================

def _corner_graph(index: CellIndex, vertex: str) -> nx.MultiGraph:
    """Link of a vertex as a multigraph: one edge per square corner."""
    graph = nx.MultiGraph()
    for cell_id, position in index.incidences(vertex):
        simplex = corner_simplex(index, cell_id, position)
        if len(simplex) == 1:
            graph.add_node(simplex[0])
        else:
            graph.add_edge(*simplex)
    return graph


def validate_surface(complex_: CubeComplex) -> dict[str, int]:
    """
    Closed square surface check: every edge lies in exactly two squares and every
    vertex link is one cycle. Returns the cycle lengths k_v.
    """
    index = ensure_valid(complex_)
    problems: list[str] = []
    if complex_.dimension != 2:
        problems.append(f"dimension is {complex_.dimension}, expected 2")
    for edge in complex_.cells_of_dim(1):
        count = len(index.cofaces(edge.id))
        if count != 2:
            problems.append(f"edge {edge.id} lies in {count} square(s)")

    orders: dict[str, int] = {}
    for vertex in sorted(c.id for c in complex_.cells_of_dim(0)):
        graph = _corner_graph(index, vertex)
        cycle = (
            graph.number_of_nodes() > 0
            and nx.is_connected(graph)
            and all(degree == 2 for _, degree in graph.degree)
        )
        if not cycle:
            problems.append(f"link of {vertex} is not a single cycle")
        orders[vertex] = graph.number_of_edges()

    if problems:
        raise InvalidSurfaceError("not a closed square surface: " + "; ".join(problems[:5]))
    return orders


def cone_orders(surface: CubeComplex) -> dict[str, int]:
    """k_v for every vertex; k_v >= 5 marks a singular cone point."""
    return validate_surface(surface)


def gauss_bonnet(surface: CubeComplex) -> GaussBonnetReport:
    """Combinatorial Gauss-Bonnet: sum of (4 - k_v) equals 4 chi."""
    orders = validate_surface(surface)
    chi = surface.euler_characteristic()
    curvature = sum(4 - k for k in orders.values())
    return GaussBonnetReport(euler_characteristic=chi, curvature_sum=curvature, holds=curvature == 4 * chi)


def _boundary_sign(position: Position) -> int:
    """Direction in which a square's counterclockwise boundary runs along the edge at `position`."""
    (axis, side), = position
    return (1 if side else -1) * (1 if axis == 1 else -1)


def is_orientable(surface: CubeComplex) -> bool:
    """
    Squares admit orientations under which the two incidences of every edge run
    in opposite directions.
    """
    validate_surface(surface)
    index = ensure_valid(surface)
    graph = nx.MultiGraph()
    graph.add_nodes_from(c.id for c in surface.cells_of_dim(2))
    for edge in surface.cells_of_dim(1):
        (first, p), (second, q) = index.cofaces(edge.id)
        graph.add_edge(first, second, parity=-_boundary_sign(p) * _boundary_sign(q))

    orientation: dict[str, int] = {}
    for component in nx.connected_components(graph):
        root = min(component)
        orientation[root] = 1
        for u, v in nx.bfs_edges(graph, root):
            parity = next(iter(graph.get_edge_data(u, v).values()))["parity"]
            orientation[v] = orientation[u] * parity
    return all(orientation[u] * orientation[v] == parity for u, v, parity in graph.edges(data="parity"))


def classify_universal_cover(surface: CubeComplex) -> ConeReport:
    """
    Compact quotients have bounded cone angles and cobounded cone points in the
    universal cover, so the cover is Euclidean without singular vertices and
    quasi-isometric to the hyperbolic plane with them.
    """
    orders = validate_surface(surface)
    chi = surface.euler_characteristic()
    singular = tuple(v for v, k in orders.items() if k >= 5)
    if any(k < 4 for k in orders.values()):
        classification = "Invalid"
    elif singular:
        classification = "QiHyperbolicPlane"
    else:
        classification = "Euclidean"

    skeleton = nx.Graph()
    skeleton.add_nodes_from(c.id for c in surface.cells_of_dim(0))
    for edge in surface.cells_of_dim(1):
        skeleton.add_edge(*(ref.id for ref in edge.facets))
    orientable = is_orientable(surface)
    genus = (2 - chi) // 2 if orientable and nx.is_connected(skeleton) else None

    if classification == "Invalid":
        logger.warning(f"Surface has a vertex of order below 4: {sorted(v for v, k in orders.items() if k < 4)}")
    return ConeReport(
        cone_orders=orders,
        cone_angles={v: format_rational(Fraction(k, 2)) for v, k in orders.items()},
        singular_vertices=singular,
        euler_characteristic=chi,
        curvature_sum=sum(4 - k for k in orders.values()),
        orientable=orientable,
        genus=genus,
        classification=classification
    )


# ==============================================================================
# SYMMETRIES AND POWER BOUNDS
# ==============================================================================

def cone_plane_symmetries(n: int) -> SymmetryReport:
    """
    Aut(Cone(R^2, n)) is dihedral of order 2n for n >= 5 with Isom = O(2); for
    n = 4 the plane is standard, Aut is infinite and the apex stabilizer is
    O(2, Z). The automorphisms are enumerated on a patch and checked to form a
    group; an automorphism fixing the apex is determined by its action on the
    patch, so the orders are read off the enumeration.
    """
    if n < 4:
        raise PreconditionError(f"cone order {n} is below 4")
    patch_radius = get_settings().SYMMETRY_PATCH_RADIUS
    patch = build_cone_plane(n, patch_radius)
    automorphisms = complex_automorphisms(patch)

    keys = sorted(automorphisms[0])
    table = {tuple(a[k] for k in keys) for a in automorphisms}
    closed = all(
        tuple(f[g[k]] for k in keys) in table
        for f in automorphisms for g in automorphisms
    )
    inverses = True
    for f in automorphisms:
        inverse = {v: k for k, v in f.items()}
        inverses &= tuple(inverse[k] for k in keys) in table
    stabilizer = sum(1 for f in automorphisms if f[APEX] == APEX)
    fixes_apex = stabilizer == len(automorphisms)

    if n == 4:
        groups = {"automorphism_group": "Z^2 x| O(2,Z)", "isometry_group": "R^2 x| O(2)"}
    else:
        groups = {"automorphism_group": f"D_{2 * n}", "isometry_group": "O(2)"}
    logger.info(f"Cone(R^2,{n}): {len(automorphisms)} patch automorphisms")
    return SymmetryReport(
        n=n,
        automorphism_order=None if n == 4 else stabilizer,
        point_group_order=stabilizer,
        enumerated=len(automorphisms),
        patch_radius=patch_radius,
        closed_under_composition=closed,
        closed_under_inverse=inverses,
        fixes_apex=fixes_apex,
        **groups
    )


def _distance_squared(p: Sequence[int], q: Sequence[int]) -> int:
    return sum((a - b) ** 2 for a, b in zip(p, q))


def integral_configurations(points: Sequence[Sequence[int]]) -> list[tuple[tuple[int, int], ...]]:
    """Integral placements y_0 = 0, y_1, ... with |y_i - y_j|^2 = |x_i - x_j|^2 for all pairs."""
    points = [tuple(p) for p in points]
    found: list[tuple[tuple[int, int], ...]] = []

    def extend(placed: list[tuple[int, int]]) -> None:
        i = len(placed)
        if i == len(points):
            found.append(tuple(placed))
            return
        for y in sphere_points(2, _distance_squared(points[i], points[0])):
            if all(_distance_squared(y, placed[j]) == _distance_squared(points[i], points[j]) for j in range(1, i)):
                extend(placed + [y])

    extend([(0, 0)])
    return found


def cubical_power_bound(points: Sequence[Sequence[int]]) -> int:
    """
    N with f^N cubical for every automorphism f of a cone plane whose cone points
    sit at `points`: 2 for two cone points, M! for M integral configurations otherwise.
    """
    if len(points) < 2:
        raise PreconditionError("a single cone point has stabilizer O(2): there is no finite power bound")
    if any(len(p) != 2 for p in points):
        raise PreconditionError("cone points must be integral vectors of Z^2")
    if len({tuple(p) for p in points}) != len(points):
        raise PreconditionError("cone points must be distinct")
    if len(points) == 2:
        return 2

    spanning = any(
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]) != 0
        for p, q, r in combinations(points, 3)
    )
    if not spanning:
        raise PreconditionError("cone points are collinear")
    configurations = integral_configurations(points)
    logger.debug(f"{len(configurations)} integral configuration(s) realize the distances")
    return factorial(len(configurations))
