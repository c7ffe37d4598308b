import pytest

from cubeflats.core.builders import build_grid
from cubeflats.core.complex import cell_index, make_cell
from cubeflats.core.exceptions import PreconditionError
from cubeflats.core.links import (
    are_isomorphic,
    ascending_link,
    check_npc,
    complex_automorphisms,
    corner_simplex,
    graph_to_dot,
    interior_point_link,
    is_flag,
    join,
    locally_maximal_cubes,
    one_skeleton,
    simplex_link,
    standard_sphere,
    vertex_link
)
from cubeflats.models.complex import CubeComplex, SimplicialComplex
from cubeflats.services.cone import build_cone_plane

TRIANGLE = SimplicialComplex.from_maximal([("a", "b"), ("b", "c"), ("a", "c")])
SQUARE = SimplicialComplex.from_maximal([("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])
K4_HOLLOW = SimplicialComplex.from_maximal([("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")])


def test_corner_of_single_square_is_an_arc():
    """A square corner contributes one 1-simplex."""
    link = vertex_link(build_grid((1, 1)), "v0,0")
    assert link.f_vector() == (2, 1)


def test_interior_grid_vertex_has_square_link(grid_3x3):
    """Four squares around a flat vertex give a 4-cycle."""
    link = vertex_link(grid_3x3, "v0,0")
    assert link.f_vector() == (4, 4)
    assert are_isomorphic(link, standard_sphere(1))


def test_cone_vertex_link_is_five_cycle():
    """The apex of Cone(R^2, 5) has a 5-cycle link."""
    link = vertex_link(build_cone_plane(5, 2), "apex")
    graph = one_skeleton(link)
    assert link.f_vector() == (5, 5)
    assert all(degree == 2 for _, degree in graph.degree)


def test_vertex_link_rejects_non_vertices(grid_3x3):
    """vertex_link needs a 0-cell."""
    with pytest.raises(PreconditionError):
        vertex_link(grid_3x3, "q0,0")


def test_ascending_links_in_grid(grid_3x3):
    """Interior edges see two squares; squares are locally maximal."""
    assert ascending_link(grid_3x3, "e0,0/2").f_vector() == (2,)
    assert ascending_link(grid_3x3, "q0,0").is_empty()


def test_ascending_link_in_cube_block():
    """The central edge of a 2x2x2 block sees a 4-cycle of squares and cubes."""
    block = build_grid((2, 2, 2))
    link = ascending_link(block, "e0,0,-1/3")
    assert link.f_vector() == (4, 4)
    assert are_isomorphic(link, standard_sphere(1))


def test_vertex_link_in_cube_block_is_octahedron():
    """The central vertex of a 2x2x2 block has the octahedron as link."""
    link = vertex_link(build_grid((2, 2, 2)), "v0,0,0")
    assert link.f_vector() == (6, 12, 8)
    assert are_isomorphic(link, standard_sphere(2))


@pytest.mark.parametrize("complex_, expected", [(TRIANGLE, False), (SQUARE, True), (K4_HOLLOW, False)])
def test_is_flag(complex_, expected):
    """Unspanned cliques break the flag condition."""
    assert is_flag(complex_) is expected


def test_check_npc_on_flat_grid(grid_3x3):
    """Flat grid patches satisfy the link condition."""
    report = check_npc(grid_3x3)
    assert report.npc
    assert report.offending_vertices == ()
    assert report.vertex_count == 16


def test_check_npc_on_three_squares(three_squares):
    """Three squares around one vertex fail only there."""
    report = check_npc(three_squares)
    assert not report.npc
    assert report.offending_vertices == ("o",)
    assert report.non_flag == ("o",)


@pytest.mark.parametrize("n", range(4, 9))
@pytest.mark.parametrize("radius", range(1, 7))
def test_check_npc_on_cone_planes(n, radius):
    """Cone(R^2, n) patches are non-positively curved for every n >= 4."""
    assert check_npc(build_cone_plane(n, radius)).npc


def test_cone_plane_of_order_three_is_refused():
    """Three quarter planes would give an empty triangle at the apex."""
    with pytest.raises(PreconditionError):
        build_cone_plane(3, 2)


def test_locally_maximal_cubes():
    """Cells with empty ascending links, including pendant edges."""
    assert locally_maximal_cubes(build_grid((2, 2))) == ["q-1,-1", "q-1,0", "q0,-1", "q0,0"]

    edge = CubeComplex(dimension=1, cells=(
        make_cell("a", 0, {}), make_cell("b", 0, {}), make_cell("e", 1, {"-1": "a", "+1": "b"})
    ))
    assert locally_maximal_cubes(edge) == ["e"]

    square = build_grid((1, 1))
    pendant = CubeComplex(dimension=2, cells=square.cells + (
        make_cell("w", 0, {}), make_cell("p", 1, {"-1": "v1,1", "+1": "w"})
    ))
    assert locally_maximal_cubes(pendant) == ["p", "q0,0"]


def test_interior_point_link_of_grid_edge(grid_3x3):
    """An interior edge has Sigma_0 * S^0, a 4-cycle."""
    report = interior_point_link(grid_3x3, "e0,0/2")
    assert report.link.f_vector() == (4, 4)
    assert report.is_flag
    assert report.join_decomposition.residual.f_vector() == (2,)


def test_interior_point_link_of_maximal_square(grid_3x3):
    """A locally maximal square has Sigma_1 alone."""
    report = interior_point_link(grid_3x3, "q0,0")
    assert report.join_decomposition.residual.is_empty()
    assert are_isomorphic(report.link, standard_sphere(1))


def test_interior_point_link_in_cube_block():
    """Sigma_0 joined with the 4-cycle ascending link is an octahedron."""
    report = interior_point_link(build_grid((2, 2, 2)), "e0,0,-1/3")
    assert report.link.f_vector() == (6, 12, 8)
    assert are_isomorphic(report.link, standard_sphere(2))


def test_interior_point_link_rejects_vertices(grid_3x3):
    """Vertices go through vertex_link instead."""
    with pytest.raises(PreconditionError):
        interior_point_link(grid_3x3, "v0,0")


@pytest.mark.parametrize(
    "complex_, vertex",
    [(build_grid((3, 3)), "v0,0"), (build_cone_plane(5, 2), "apex"), (build_grid((2, 2, 2)), "v0,0,0")]
)
def test_interior_point_links_embed_in_vertex_link(complex_, vertex):
    """The link of the simplex a cell spans in lk(v) is the ascending link of the cell."""
    index = cell_index(complex_)
    link = vertex_link(complex_, vertex)
    for cell_id, position in index.incidences(vertex):
        local = simplex_link(link, corner_simplex(index, cell_id, position))
        report = interior_point_link(complex_, cell_id)
        assert are_isomorphic(local, report.join_decomposition.residual)
        assert are_isomorphic(report.link, join(standard_sphere(index.dim(cell_id) - 1), local))


@pytest.mark.parametrize("m, f_vector", [(-1, ()), (0, (2,)), (1, (4, 4)), (2, (6, 12, 8)), (3, (8, 24, 32, 16))])
def test_standard_sphere(m, f_vector):
    """Sigma_m is the boundary of the (m+1)-cross-polytope."""
    assert standard_sphere(m).f_vector() == f_vector


def test_join_of_zero_spheres():
    """S^0 * S^0 is a 4-cycle."""
    other = SimplicialComplex.from_maximal([], vertices=["x", "y"])
    joined = join(standard_sphere(0), other)
    assert are_isomorphic(joined, SQUARE)
    with pytest.raises(PreconditionError):
        join(standard_sphere(0), standard_sphere(0))


def test_join_with_empty_complex():
    """The empty complex is the unit of the join."""
    assert join(SQUARE, SimplicialComplex()) == SQUARE


def test_simplex_link():
    """The link of a vertex of the octahedron is a 4-cycle."""
    link = simplex_link(standard_sphere(2), ["+1"])
    assert are_isomorphic(link, standard_sphere(1))
    with pytest.raises(PreconditionError):
        simplex_link(SQUARE, ["a", "c"])


def test_are_isomorphic_distinguishes_cycles():
    """Triangles and 4-cycles are not isomorphic; relabelled 4-cycles are."""
    assert not are_isomorphic(TRIANGLE, SQUARE)
    relabelled = SimplicialComplex.from_maximal([("1", "3"), ("3", "2"), ("2", "4"), ("4", "1")])
    assert are_isomorphic(SQUARE, relabelled)


def test_simplicial_complex_requires_closure():
    """Every face of a listed simplex must be listed too."""
    with pytest.raises(ValueError):
        SimplicialComplex(vertices=("a", "b"), simplices=(("a",), ("a", "b")))


def test_square_automorphisms():
    """The single square has the dihedral group of order 8 as automorphisms."""
    assert len(complex_automorphisms(build_grid((1, 1)))) == 8


def test_graph_to_dot_is_sorted():
    """DOT output lists nodes and edges in sorted order."""
    text = graph_to_dot(one_skeleton(TRIANGLE), name="lk")
    assert [line.strip() for line in text.splitlines()] == [
        "graph lk {", "a", "b", "c", "a -- b", "a -- c", "b -- c", "}"
    ]


def test_graph_to_dot_quotes_cell_ids():
    """Ids with punctuation are quoted."""
    text = graph_to_dot(one_skeleton(vertex_link(build_grid((2, 2)), "v0,0")), name="lk(v0,0)")
    assert text.startswith('graph "lk(v0,0)" {')
    assert '"e0,0/1:-1"' in text
