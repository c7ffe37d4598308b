import logging
from collections import deque
from itertools import product
from math import comb
from typing import Optional, Sequence

import networkx as nx

from cubeflats.config import get_settings
from cubeflats.core.complex import CellIndex, ensure_valid, face_label
from cubeflats.core.exceptions import CubicalTraceError, NpcViolationError, PreconditionError
from cubeflats.core.links import (
    are_isomorphic,
    ascending_link,
    corner_simplex,
    is_flag,
    link_simplices,
    one_skeleton,
    standard_sphere,
)
from cubeflats.models.complex import CubeComplex, SimplicialComplex
from cubeflats.models.isometry import CubeSpec, RationalOrthoAffine
from cubeflats.models.schemas import (
    Chart,
    DevelopmentResult,
    FrontierCell,
    IdentityCheck,
    IdentityReport,
    SphereClass,
)
from cubeflats.services.isometry import is_cubical_map, require_orthogonal, transverse_rank

logger = logging.getLogger(__name__)

Facet = tuple[int, int]


# ==============================================================================
# CHART GEOMETRY
# ==============================================================================

def _facet_value(chart: Chart, axis: int, side: int) -> tuple[int, int]:
    """Global axis of a facet's normal and the value of that coordinate on the facet."""
    g = chart.axes[axis - 1]
    sign = chart.signs[axis - 1]
    return g, chart.origin[g - 1] + (side if sign > 0 else 1 - side)


def facet_cube(chart: Chart, axis: int, side: int) -> CubeSpec:
    g, value = _facet_value(chart, axis, side)
    offset = list(chart.origin)
    offset[g - 1] = value
    return CubeSpec(coordinates=tuple(sorted(a for a in chart.axes if a != g)), offset=tuple(offset))


def neighbor_chart(chart: Chart, axis: int, side: int, partner: str, partner_facet: Facet) -> Chart:
    """Chart of the cube glued to facet (axis, side) of a charted cube, at its own facet `partner_facet`."""
    n = len(chart.axes)
    g, value = _facet_value(chart, axis, side)
    above = value == chart.origin[g - 1] + 1
    partner_axis, partner_side = partner_facet

    axes = [0] * n
    signs = [0] * n
    own = [j for j in range(1, n + 1) if j != axis]
    theirs = [j for j in range(1, n + 1) if j != partner_axis]
    for j_theirs, j_own in zip(theirs, own):
        axes[j_theirs - 1] = chart.axes[j_own - 1]
        signs[j_theirs - 1] = chart.signs[j_own - 1]
    axes[partner_axis - 1] = g
    if above:
        signs[partner_axis - 1] = 1 if partner_side == 0 else -1
    else:
        signs[partner_axis - 1] = 1 if partner_side == 1 else -1

    origin = list(chart.origin)
    origin[g - 1] = value if above else value - 1
    return Chart(
        cell=partner,
        origin=tuple(origin),
        axes=tuple(axes),
        signs=tuple(signs),
        parent=chart.cell,
        via=face_label(axis, side),
        depth=chart.depth + 1
    )


def _partners(index: CellIndex, cell_id: str, facet: Facet) -> list[tuple[str, Facet]]:
    facet_id = index.facet(cell_id, *facet)
    return [
        (e, position[0]) for e, position in index.cofaces(facet_id)
        if (e, position[0]) != (cell_id, facet)
    ]


def _facets(n: int) -> list[Facet]:
    return [(axis, side) for axis in range(1, n + 1) for side in (0, 1)]


def _insert(corner: Sequence[int], axis: int, side: int) -> tuple[int, ...]:
    return tuple(corner[: axis - 1]) + (side,) + tuple(corner[axis - 1:])


# ==============================================================================
# DEVELOPMENT
# ==============================================================================

def develop(complex_: CubeComplex, seed: Chart, tau: RationalOrthoAffine, radius: int) -> DevelopmentResult:
    """
    Charts the n-cubes reached from the seed across facets whose image under tau
    meets the interior of n-cubes, up to `radius` facet crossings.

    Charts form a spanning tree rooted at the seed. Facets between charted cubes
    whose charts disagree are reported as seams; this is the development
    monodromy around branch vertices. Interior vertices whose charted link is not
    Sigma_{n-1} are the branch vertices.
    """
    index = ensure_valid(complex_)
    n = tau.n
    require_orthogonal(tau)
    if is_cubical_map(tau):
        raise CubicalTraceError("cubical trace: the isometry preserves the cube structure")
    if n < 2:
        raise PreconditionError("development needs dimension at least 2")
    if radius < 1:
        raise PreconditionError(f"radius must be at least 1, got {radius}")
    if index.dim(seed.cell) != n or len(seed.axes) != n:
        raise PreconditionError(f"seed {seed.cell} is not a {n}-cube with an {n}-dimensional chart")

    root = seed.model_copy(update={"parent": None, "via": None, "depth": 0})
    charts: dict[str, Chart] = {seed.cell: root}
    queue = deque([seed.cell])

    # 1. Breadth-first chart extension
    while queue:
        chart = charts[queue.popleft()]
        if chart.depth >= radius:
            continue
        for axis, side in _facets(n):
            if transverse_rank(tau, facet_cube(chart, axis, side)) <= n - 1:
                continue
            partners = _partners(index, chart.cell, (axis, side))
            if len(partners) != 1 or partners[0][0] in charts:
                continue
            partner, partner_facet = partners[0]
            charts[partner] = neighbor_chart(chart, axis, side, partner, partner_facet)
            logger.debug(f"Charted {partner} across {face_label(axis, side)} of {chart.cell}")
            queue.append(partner)

    # 2. Frontier and seams
    frontier: dict[str, str] = {}
    seams: set[str] = set()
    for cell_id in sorted(charts):
        chart = charts[cell_id]
        for axis, side in _facets(n):
            facet_id = index.facet(cell_id, axis, side)
            partners = _partners(index, cell_id, (axis, side))
            if transverse_rank(tau, facet_cube(chart, axis, side)) <= n - 1:
                frontier.setdefault(facet_id, "hypersurface")
            elif not partners:
                frontier.setdefault(facet_id, "boundary")
            elif len(partners) > 1:
                frontier.setdefault(facet_id, "branching")
            elif partners[0][0] not in charts:
                frontier.setdefault(facet_id, "radius")
            else:
                partner, partner_facet = partners[0]
                expected = neighbor_chart(chart, axis, side, partner, partner_facet)
                if not expected.same_placement(charts[partner]):
                    seams.add(facet_id)

    # 3. Link condition on every vertex met
    vertices = sorted({v for cell_id in charts for v in index.vertices_of(cell_id)})
    offending = []
    for vertex in vertices:
        faces, simplicial = link_simplices(index, vertex)
        if not simplicial or not is_flag(SimplicialComplex.from_maximal(faces)):
            offending.append(vertex)
    if offending:
        raise NpcViolationError(offending)

    # 4. Branch locus
    sphere = standard_sphere(n - 1)
    interior = [v for v in vertices if _is_interior(index, charts, v)]
    branch = [v for v in interior if not are_isomorphic(charted_link(index, charts, v), sphere)]
    link_class = {v: classify_sphere(charted_link(index, charts, v), n - 1) for v in branch}

    logger.info(
        f"Developed {len(charts)} cube(s) from {seed.cell} at radius {radius}: "
        f"{len(branch)} branch vertex(es), {len(seams)} seam(s), {len(frontier)} frontier facet(s)"
    )
    return DevelopmentResult(
        seed=seed.cell,
        dimension=n,
        radius=radius,
        charts={key: charts[key] for key in sorted(charts)},
        branch_vertices=tuple(branch),
        interior_vertices=tuple(interior),
        link_class=link_class,
        frontier=tuple(FrontierCell(cell=key, reason=frontier[key]) for key in sorted(frontier)),
        seams=tuple(sorted(seams)),
        residual_link=ascending_link(complex_, seed.cell)
    )


def _corners_at(index: CellIndex, charts: dict[str, Chart], vertex: str) -> list[tuple[str, tuple[int, ...]]]:
    return [
        (cell_id, corner)
        for cell_id in charts
        for corner, v in index.corners(cell_id).items()
        if v == vertex
    ]


def _is_interior(index: CellIndex, charts: dict[str, Chart], vertex: str) -> bool:
    """Every facet at the vertex of every charted cube there is shared with exactly one other charted cube."""
    for cell_id, corner in _corners_at(index, charts, vertex):
        for axis, side in enumerate(corner, start=1):
            partners = _partners(index, cell_id, (axis, side))
            if len(partners) != 1 or partners[0][0] not in charts:
                return False
    return True


def charted_link(index: CellIndex, charts: dict[str, Chart], vertex: str) -> SimplicialComplex:
    """M_v: the part of lk(v) spanned by corners of charted cubes."""
    return SimplicialComplex.from_maximal(
        corner_simplex(index, cell_id, tuple(enumerate(corner, start=1)))
        for cell_id, corner in _corners_at(index, charts, vertex)
    )


def branch_link(complex_: CubeComplex, result: DevelopmentResult, vertex: str) -> SphereClass:
    if vertex not in result.branch_vertices:
        raise PreconditionError(f"{vertex} is not a branch vertex of this development")
    index = ensure_valid(complex_)
    return classify_sphere(charted_link(index, result.charts, vertex), result.dimension - 1)


def check_chart_compatibility(complex_: CubeComplex, result: DevelopmentResult) -> list[str]:
    """Tree edges whose two charts disagree on a corner of the shared facet (cells of the child side)."""
    index = ensure_valid(complex_)
    offending = []
    for cell_id, chart in result.charts.items():
        if chart.parent is None:
            continue
        parent = result.charts[chart.parent]
        axis, side = int(chart.via[1:]), int(chart.via[0] == "+")
        partners = [(e, f) for e, f in _partners(index, parent.cell, (axis, side)) if e == cell_id]
        if not partners:
            offending.append(cell_id)
            continue
        partner_axis, partner_side = partners[0][1]
        for corner in product((0, 1), repeat=len(chart.axes) - 1):
            if parent.point(_insert(corner, axis, side)) != chart.point(_insert(corner, partner_axis, partner_side)):
                offending.append(cell_id)
                break
    return sorted(offending)


def development_graph(complex_: CubeComplex, result: DevelopmentResult) -> nx.Graph:
    """Dual graph of the charted region: charted cubes joined across shared facets."""
    index = ensure_valid(complex_)
    graph = nx.Graph()
    graph.add_nodes_from(result.charts)
    for cell_id in result.charts:
        for facet in _facets(result.dimension):
            for partner, _ in _partners(index, cell_id, facet):
                if partner in result.charts and partner != cell_id:
                    graph.add_edge(cell_id, partner)
    return graph


# ==============================================================================
# SPHERE RECOGNITION
# ==============================================================================

def classify_sphere(link: SimplicialComplex, m: int) -> SphereClass:
    """Circle(k) for m = 1, StandardSphere(m) for cross-polytope boundaries, NotASphere otherwise."""
    counts = link.f_vector()
    if link.dimension != m:
        return SphereClass(kind="NotASphere", dimension=m, counts=counts,
                           violations=(f"link has dimension {link.dimension}, expected {m}",))

    if m == 1:
        graph = one_skeleton(link)
        k = graph.number_of_edges()
        if not nx.is_connected(graph) or any(degree != 2 for _, degree in graph.degree):
            return SphereClass(kind="NotASphere", dimension=1, counts=counts, violations=("not a single cycle",))
        if k < 4:
            return SphereClass(kind="NotASphere", dimension=1, counts=counts,
                               violations=(f"cycle length {k} is below 4",))
        return SphereClass(kind="Circle", dimension=1, cycle_length=k, counts=counts)

    violations: list[str] = []
    top = set(link.simplices_of_dim(m))
    if any(len(s) != m + 1 for s in link.maximal_simplices()):
        violations.append("not pure")
    ridges: dict[tuple[str, ...], int] = {r: 0 for r in link.simplices_of_dim(m - 1)}
    for simplex in top:
        for i in range(len(simplex)):
            ridges[simplex[:i] + simplex[i + 1:]] += 1
    if any(count != 2 for count in ridges.values()):
        violations.append("not a pseudomanifold")
    if not is_flag(link):
        violations.append("not flag")
    violations.extend(simplex_count_identities(m, counts).failed())
    if not violations and not are_isomorphic(link, standard_sphere(m)):
        violations.append("not isomorphic to the cross-polytope boundary")
    if violations:
        return SphereClass(kind="NotASphere", dimension=m, counts=counts, violations=tuple(violations))
    return SphereClass(kind="StandardSphere", dimension=m, counts=counts)


def simplex_count_identities(m: int, counts: Sequence[int]) -> IdentityReport:
    """
    Counting constraints on a flag triangulation of S^m whose m-simplices are
    all-right spherical simplices: 2^(m-k) F_k = C(m+1, k+1) F_m for every k,
    C(F_0, 2) >= F_1, and the conclusion F_m >= 2^(m+1).
    """
    if m < 1:
        raise PreconditionError(f"m must be at least 1, got {m}")
    if len(counts) != m + 1 or any(c <= 0 for c in counts):
        raise PreconditionError(f"need {m + 1} positive counts F_0..F_{m}, got {tuple(counts)}")

    checks = []
    top = counts[m]
    for k in range(m + 1):
        lhs, rhs = 2 ** (m - k) * counts[k], comb(m + 1, k + 1) * top
        checks.append(IdentityCheck(name=f"incidence k={k}", lhs=lhs, rhs=rhs, relation="==", holds=lhs == rhs))
    lhs = comb(counts[0], 2)
    checks.append(IdentityCheck(name="edge bound", lhs=lhs, rhs=counts[1], relation=">=", holds=lhs >= counts[1]))
    checks.append(IdentityCheck(name="top bound", lhs=top, rhs=2 ** (m + 1), relation=">=", holds=top >= 2 ** (m + 1)))
    return IdentityReport(m=m, counts=tuple(counts), checks=tuple(checks))


def sphere_volume_identity(m: int) -> bool:
    """vol(S^m) = 2^(m+1) vol(simplex): the (m+1)-cross-polytope has 2^(m+1) facets."""
    ceiling = get_settings().MAX_SPHERE_DIM
    if not 1 <= m <= ceiling:
        raise PreconditionError(f"m must lie in 1..{ceiling}, got {m}")
    facets = standard_sphere(m).simplices_of_dim(m)
    # one facet per orthant, one vertex per axis
    orthants = {tuple(sorted(int(v[1:]) for v in facet)) for facet in facets}
    return len(facets) == 2 ** (m + 1) and orthants == {tuple(range(1, m + 2))}


def default_seed(complex_: CubeComplex, cell_id: str, origin: Optional[Sequence[int]] = None) -> Chart:
    """Identity chart of an n-cube at `origin` (the zero vector by default)."""
    index = ensure_valid(complex_)
    n = index.dim(cell_id)
    return Chart.standard(cell_id, tuple(origin) if origin is not None else (0,) * n)
