from fractions import Fraction

import pytest

from cubeflats.core.builders import build_grid
from cubeflats.core.exceptions import CubicalTraceError, NpcViolationError, PreconditionError, UnknownCellError
from cubeflats.core.links import standard_sphere
from cubeflats.models.complex import SimplicialComplex
from cubeflats.models.isometry import RationalOrthoAffine
from cubeflats.models.schemas import Chart
from cubeflats.services.cone import build_cone_plane
from cubeflats.services.constructions import find_pythagorean_doubles, swap_isometry
from cubeflats.services.develop import (
    branch_link,
    check_chart_compatibility,
    classify_sphere,
    default_seed,
    develop,
    development_graph,
    facet_cube,
    neighbor_chart,
    simplex_count_identities,
    sphere_volume_identity
)

F = Fraction
ROTATION_3D = RationalOrthoAffine.from_rows([[1, 0, 0], [0, F(3, 5), F(-4, 5)], [0, F(4, 5), F(3, 5)]])


@pytest.fixture(scope="module")
def flat_development():
    grid = build_grid((11, 11))
    tau = RationalOrthoAffine.from_rows([[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]])
    return grid, develop(grid, default_seed(grid, "q0,0", (0, 0)), tau, radius=3)


@pytest.fixture(scope="module")
def cone_development():
    cone = build_cone_plane(5, 4)
    tau = RationalOrthoAffine.from_rows([[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]])
    return cone, develop(cone, default_seed(cone, "Q0.q0,0"), tau, radius=3)


# ==============================================================================
# CHARTS
# ==============================================================================

def test_chart_point_and_validation():
    """Charts place local points by axis permutation and orientation."""
    chart = Chart(cell="q", origin=(2, 0), axes=(2, 1), signs=(1, -1))
    assert chart.point((F(1, 4), 0)) == (3, F(1, 4))
    with pytest.raises(ValueError):
        Chart(cell="q", origin=(0, 0), axes=(1, 1), signs=(1, 1))
    with pytest.raises(ValueError):
        Chart(cell="q", origin=(0, 0), axes=(1, 2), signs=(1, 0))


def test_neighbor_chart_across_plus_face():
    """Crossing '+1' of a standard chart moves the origin by e_1."""
    seed = Chart.standard("a", (0, 0))
    chart = neighbor_chart(seed, 1, 1, "b", (1, 0))
    assert chart.origin == (1, 0)
    assert (chart.axes, chart.signs) == ((1, 2), (1, 1))
    assert (chart.parent, chart.via, chart.depth) == ("a", "+1", 1)


def test_neighbor_chart_with_flipped_partner():
    """A partner glued along its own '+1' face is charted with a reversed axis."""
    chart = neighbor_chart(Chart.standard("a", (0, 0)), 1, 1, "b", (1, 1))
    assert chart.origin == (1, 0)
    assert chart.signs[0] == -1
    assert chart.point((1, 0)) == (1, 0)


def test_facet_cube():
    """Facets of a chart are unit cubes of the ambient cubulation."""
    cube = facet_cube(Chart.standard("a", (3, -1)), 2, 1)
    assert cube.coordinates == (1,)
    assert cube.offset == (3, 0)


# ==============================================================================
# DEVELOPMENT
# ==============================================================================

def test_flat_grid_development(flat_development):
    """The radius-3 ball of an 11x11 grid develops without branch vertices."""
    grid, result = flat_development
    assert len(result.charts) == 25
    assert result.branch_vertices == ()
    assert result.seams == ()
    assert result.link_class == {}
    assert result.residual_link.is_empty()
    assert {entry.reason for entry in result.frontier} == {"radius"}
    assert check_chart_compatibility(grid, result) == []


def test_flat_grid_charts_agree_with_coordinates(flat_development):
    """On a flat patch every chart is the translation to its cube."""
    _, result = flat_development
    for cell_id, chart in result.charts.items():
        x, y = (int(v) for v in cell_id[1:].split(","))
        assert chart.origin == (x, y)
        assert chart.signs == (1, 1)


def test_cone_development_branches_at_apex(cone_development):
    """Cone(R^2, 5) seeded beside the apex has branch locus {apex}."""
    cone, result = cone_development
    assert result.branch_vertices == ("apex",)
    assert result.link_class["apex"].label == "Circle(5)"
    assert "apex" in result.interior_vertices
    assert check_chart_compatibility(cone, result) == []


def test_branch_link_of_apex(cone_development):
    """The charted link of the apex is a 5-cycle."""
    cone, result = cone_development
    sphere_class = branch_link(cone, result, "apex")
    assert sphere_class.kind == "Circle"
    assert sphere_class.cycle_length == 5
    with pytest.raises(PreconditionError):
        branch_link(cone, result, "Q0.v1,1")


def test_pythagorean_swap_develops_without_branching():
    """The (1,8), (7,4) swap develops over a flat patch with no branch vertices."""
    pair = next(p for p in find_pythagorean_doubles(8) if (p.a, p.b) == ((1, 8), (7, 4)))
    grid = build_grid((8, 8))
    result = develop(grid, default_seed(grid, "q0,0"), swap_isometry(pair), radius=3)
    assert len(result.charts) == 25
    assert result.branch_vertices == ()
    assert result.seams == ()
    assert "hypersurface" not in {entry.reason for entry in result.frontier}
    assert check_chart_compatibility(grid, result) == []


def test_development_graph(flat_development):
    """The dual graph of the charted region is connected."""
    grid, result = flat_development
    graph = development_graph(grid, result)
    assert graph.number_of_nodes() == 25
    assert graph.has_edge("q0,0", "q1,0")


def test_development_stops_at_hypersurfaces():
    """With tau = [1] + R, facets normal to e_1 stay in a hypersurface."""
    block = build_grid((3, 3, 3))
    result = develop(block, default_seed(block, "c0,0,0"), ROTATION_3D, radius=2)
    assert len(result.charts) == 9
    assert {cell_id.split(",")[0] for cell_id in result.charts} == {"c0"}
    assert "hypersurface" in {entry.reason for entry in result.frontier}
    assert check_chart_compatibility(block, result) == []


def test_small_patch_hits_the_boundary():
    """A single square develops to itself; all its facets are boundary."""
    square = build_grid((1, 1))
    tau = RationalOrthoAffine.from_rows([[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]])
    result = develop(square, default_seed(square, "q0,0"), tau, radius=2)
    assert list(result.charts) == ["q0,0"]
    assert {entry.reason for entry in result.frontier} == {"boundary"}


def test_cubical_trace_is_refused(grid_3x3):
    """Signed permutations leave nothing to develop."""
    tau = RationalOrthoAffine.from_rows([[0, -1], [1, 0]])
    with pytest.raises(CubicalTraceError):
        develop(grid_3x3, default_seed(grid_3x3, "q0,0"), tau, radius=2)


def test_bad_seeds(grid_3x3, rotation):
    """Seeds must be known top-dimensional cells and radii positive."""
    with pytest.raises(UnknownCellError):
        default_seed(grid_3x3, "q7,7")
    with pytest.raises(PreconditionError):
        develop(grid_3x3, default_seed(grid_3x3, "e0,0/1"), rotation, radius=2)
    with pytest.raises(PreconditionError):
        develop(grid_3x3, default_seed(grid_3x3, "q0,0"), rotation, radius=0)


def test_link_condition_is_enforced(three_squares, rotation):
    """Developing through a non-flag vertex raises NpcViolationError."""
    with pytest.raises(NpcViolationError) as info:
        develop(three_squares, default_seed(three_squares, "s1"), rotation, radius=2)
    assert info.value.vertices == ["o"]


# ==============================================================================
# SPHERE RECOGNITION
# ==============================================================================

def test_classify_octahedron():
    """The octahedron boundary is StandardSphere(2) with counts (6, 12, 8)."""
    result = classify_sphere(standard_sphere(2), 2)
    assert result.kind == "StandardSphere"
    assert result.counts == (6, 12, 8)
    assert result.label == "StandardSphere(2)"


@pytest.mark.parametrize(
    "edges, kind, length",
    [
        ([("a", "b"), ("b", "c"), ("a", "c")], "NotASphere", None),
        ([("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")], "Circle", 4),
        ([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "f"), ("a", "f")], "Circle", 6),
        ([("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"), ("w", "x"), ("x", "y"), ("y", "z"), ("w", "z")],
         "NotASphere", None),
    ]
)
def test_classify_circles(edges, kind, length):
    """Cycles of length at least 4 are circles; triangles and disjoint cycles are not."""
    result = classify_sphere(SimplicialComplex.from_maximal(edges), 1)
    assert result.kind == kind
    assert result.cycle_length == length


def test_classify_wrong_dimension():
    """A 1-dimensional link cannot be a 2-sphere."""
    result = classify_sphere(standard_sphere(1), 2)
    assert result.kind == "NotASphere"
    assert result.violations


@pytest.mark.parametrize(
    "m, counts, holds",
    [
        (2, (6, 12, 8), True),
        (1, (4, 4), True),
        (2, (5, 9, 6), False),
        (3, (8, 24, 32, 16), True),
    ]
)
def test_simplex_count_identities(m, counts, holds):
    """Incidence identities of all-right triangulations."""
    report = simplex_count_identities(m, counts)
    assert report.all_hold is holds
    if not holds:
        assert any(name.startswith("incidence") for name in report.failed())


@pytest.mark.parametrize("m", range(1, 7))
def test_cross_polytope_counts(m):
    """F_k = 2^(k+1) C(m+1, k+1) satisfies every identity with F_m = 2^(m+1)."""
    counts = standard_sphere(m).f_vector()
    report = simplex_count_identities(m, counts)
    assert report.all_hold
    assert counts[m] == 2 ** (m + 1)
    assert sphere_volume_identity(m)


@pytest.mark.parametrize("m", [0, 7])
def test_sphere_volume_identity_range(m):
    """Dimensions outside 1..6 are refused."""
    with pytest.raises(PreconditionError):
        sphere_volume_identity(m)


def test_simplex_count_identities_validates_counts():
    """Counts must be positive and of length m + 1."""
    with pytest.raises(PreconditionError):
        simplex_count_identities(2, (6, 12))
