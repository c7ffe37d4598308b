import logging
from itertools import product
from typing import Iterable

import graphviz
import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher, categorical_node_match

from cubeflats.core.complex import CellIndex, Position, ensure_valid, position_label, require_vertex
from cubeflats.core.exceptions import PreconditionError
from cubeflats.models.complex import CubeComplex, SimplicialComplex
from cubeflats.models.schemas import JoinDecomposition, LinkReport, NpcReport

logger = logging.getLogger(__name__)


# ==============================================================================
# LINKS OF CELLS
# ==============================================================================

def incidence_name(cell_id: str, position: Position) -> str:
    """Link vertex for a cell containing the base cell at `position`."""
    return f"{cell_id}:{position_label(position)}"


def corner_simplex(index: CellIndex, cell_id: str, position: Position) -> list[str]:
    """Link vertices spanned by one incidence (cell, position): one per fixed axis."""
    vertices = []
    for axis, side in position:
        rest = tuple((a, s) for a, s in position if a != axis)
        parent = index.face(cell_id, rest)
        renumbered = axis - sum(1 for a, _ in rest if a < axis)
        vertices.append(incidence_name(parent, ((renumbered, side),)))
    return vertices


def link_simplices(index: CellIndex, cell_id: str) -> tuple[list[list[str]], bool]:
    """Corner simplices of every cell strictly containing `cell_id`, and whether they form a simplicial complex."""
    faces = [corner_simplex(index, e, p) for e, p in index.incidences(cell_id)]
    spans = [frozenset(face) for face in faces]
    simplicial = all(len(span) == len(face) for span, face in zip(spans, faces)) and len(set(spans)) == len(spans)
    return faces, simplicial


def ascending_link(complex_: CubeComplex, cell_id: str) -> SimplicialComplex:
    index = ensure_valid(complex_)
    index.cell(cell_id)
    faces, _ = link_simplices(index, cell_id)
    return SimplicialComplex.from_maximal(faces)


def vertex_link(complex_: CubeComplex, vertex_id: str) -> SimplicialComplex:
    """Link of a vertex: k-simplices are the corners of (k+1)-cells at the vertex."""
    index = ensure_valid(complex_)
    require_vertex(index, vertex_id)
    faces, _ = link_simplices(index, vertex_id)
    return SimplicialComplex.from_maximal(faces)


def locally_maximal_cubes(complex_: CubeComplex) -> list[str]:
    """Cells with empty ascending link."""
    index = ensure_valid(complex_)
    return sorted(cell.id for cell in complex_.cells if not index.cofaces(cell.id))


def interior_point_link(complex_: CubeComplex, cell_id: str) -> LinkReport:
    """Common link of interior points of a cell: Sigma_{n-1} * lk(C)."""
    index = ensure_valid(complex_)
    dim = index.dim(cell_id)
    if dim < 1:
        raise PreconditionError(f"{cell_id} is a vertex; use vertex_link")
    sphere = standard_sphere(dim - 1)
    residual = ascending_link(complex_, cell_id)
    link = join(sphere, residual)
    return LinkReport(
        link=link,
        is_flag=is_flag(link),
        join_decomposition=JoinDecomposition(sphere=sphere, residual=residual)
    )


# ==============================================================================
# FLAG AND LINK CONDITION
# ==============================================================================

def one_skeleton(complex_: SimplicialComplex) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(complex_.vertices)
    graph.add_edges_from(s for s in complex_.simplices if len(s) == 2)
    return graph


def is_flag(complex_: SimplicialComplex) -> bool:
    """True iff every clique of the 1-skeleton spans a simplex."""
    present = set(complex_.simplices)
    for clique in nx.enumerate_all_cliques(one_skeleton(complex_)):
        if len(clique) >= 3 and tuple(sorted(clique)) not in present:
            return False
    return True


def check_npc(complex_: CubeComplex) -> NpcReport:
    """
    Gromov's link condition at every vertex.

    A passing report certifies non-positive curvature only; the complex is CAT(0)
    when it is in addition simply connected, which is left to the caller.
    """
    index = ensure_valid(complex_)
    non_simplicial: list[str] = []
    non_flag: list[str] = []
    vertices = complex_.cells_of_dim(0)
    for vertex in vertices:
        faces, simplicial = link_simplices(index, vertex.id)
        if not simplicial:
            non_simplicial.append(vertex.id)
        if not is_flag(SimplicialComplex.from_maximal(faces)):
            non_flag.append(vertex.id)

    offending = sorted(set(non_simplicial) | set(non_flag))
    if offending:
        logger.warning(f"Link condition fails at {len(offending)} vertex(es): {', '.join(offending[:5])}")
    return NpcReport(
        npc=not offending,
        offending_vertices=tuple(offending),
        non_simplicial=tuple(sorted(non_simplicial)),
        non_flag=tuple(sorted(non_flag)),
        vertex_count=len(vertices)
    )


# ==============================================================================
# SIMPLICIAL CONSTRUCTIONS
# ==============================================================================

def join(left: SimplicialComplex, right: SimplicialComplex) -> SimplicialComplex:
    """Simplicial join; the vertex sets must be disjoint."""
    if set(left.vertices) & set(right.vertices):
        raise PreconditionError("join needs disjoint vertex sets")
    if left.is_empty():
        return right
    if right.is_empty():
        return left
    return SimplicialComplex.from_maximal(
        sigma + tau for sigma in left.maximal_simplices() for tau in right.maximal_simplices()
    )


def standard_sphere(m: int) -> SimplicialComplex:
    """Sigma_m: boundary of the (m+1)-dimensional cross-polytope. Sigma_{-1} is empty."""
    if m < -1:
        raise PreconditionError(f"no sphere of dimension {m}")
    if m == -1:
        return SimplicialComplex()
    axes = range(1, m + 2)
    return SimplicialComplex.from_maximal(
        [f"{sign}{axis}" for sign, axis in zip(signs, axes)] for signs in product("+-", repeat=m + 1)
    )


def simplex_link(complex_: SimplicialComplex, simplex: Iterable[str]) -> SimplicialComplex:
    """lk(sigma) = {tau : tau and sigma disjoint, tau + sigma a simplex}."""
    sigma = frozenset(simplex)
    present = set(complex_.simplices)
    if not sigma or tuple(sorted(sigma)) not in present:
        raise PreconditionError(f"{sorted(sigma)} is not a simplex")
    taus = [tau for tau in complex_.simplices if not sigma & set(tau) and tuple(sorted(sigma | set(tau))) in present]
    return SimplicialComplex.from_maximal(taus)


def _incidence_graph(complex_: SimplicialComplex) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from((("v", v) for v in complex_.vertices), kind="vertex")
    for i, facet in enumerate(complex_.maximal_simplices()):
        graph.add_node(("f", i), kind="facet")
        graph.add_edges_from((("f", i), ("v", v)) for v in facet)
    return graph


def are_isomorphic(left: SimplicialComplex, right: SimplicialComplex) -> bool:
    """Isomorphism of simplicial complexes via their vertex-facet incidence graphs."""
    if left.f_vector() != right.f_vector():
        return False
    return nx.is_isomorphic(
        _incidence_graph(left),
        _incidence_graph(right),
        node_match=categorical_node_match("kind", None)
    )


# ==============================================================================
# COMPLEX SYMMETRIES AND EXPORT
# ==============================================================================

def cell_graph(complex_: CubeComplex) -> nx.Graph:
    """Hasse diagram of the face poset, nodes tagged with their dimension."""
    graph = nx.Graph()
    for cell in complex_.cells:
        graph.add_node(cell.id, dim=cell.dim)
    for cell in complex_.cells:
        graph.add_edges_from((cell.id, ref.id) for ref in cell.facets)
    return graph


def complex_automorphisms(complex_: CubeComplex) -> list[dict[str, str]]:
    """
    All automorphisms of the face poset.

    For regular complexes (distinct facets, embedded cells) these are exactly the
    cubical automorphisms.
    """
    ensure_valid(complex_)
    graph = cell_graph(complex_)
    matcher = GraphMatcher(graph, graph, node_match=categorical_node_match("dim", -1))
    automorphisms = [dict(sorted(mapping.items())) for mapping in matcher.isomorphisms_iter()]
    logger.debug(f"Enumerated {len(automorphisms)} automorphisms on {graph.number_of_nodes()} cells")
    return automorphisms


def graph_to_dot(graph: nx.Graph, name: str = "G") -> str:
    """DOT source for an undirected graph, nodes and edges in sorted order."""
    dot = graphviz.Graph(name)
    for node in sorted(graph.nodes, key=str):
        dot.node(str(node))
    for u, v in sorted(tuple(sorted((str(u), str(v)))) for u, v in graph.edges):
        dot.edge(u, v)
    return dot.source
