from fractions import Fraction

import pytest
from pydantic import ValidationError

from cubeflats.core.complex import validate
from cubeflats.core.exceptions import PreconditionError
from cubeflats.core.links import check_npc
from cubeflats.models.isometry import RationalOrthoAffine
from cubeflats.models.schemas import CoverSpec, PythagoreanPair
from cubeflats.services.cone import classify_universal_cover, cone_orders, gauss_bonnet
from cubeflats.services.constructions import (
    LatticeSheets,
    automorphism_inverse,
    branched_cover,
    build_torus,
    evaluate_word,
    find_pythagorean_doubles,
    fundamental_squares,
    lift_check,
    lift_report,
    swap_isometry,
    verify_descends
)
from cubeflats.services.isometry import is_cubical_map
from cubeflats.utils import permutations as perm
from cubeflats.utils.words import format_word, parse_word, substitute

F = Fraction
GENUS_TWO = CoverSpec(degree=3, sigma_a=(2, 1, 3), sigma_b=(1, 3, 2))


@pytest.fixture(scope="module")
def unit_torus():
    return build_torus((1, 0), (0, 1))


# ==============================================================================
# PYTHAGOREAN DOUBLES
# ==============================================================================

def test_pythagorean_doubles_up_to_eight():
    """(1,8) and (7,4) share norm 65."""
    pairs = find_pythagorean_doubles(8)
    assert PythagoreanPair(a=(1, 8), b=(7, 4), norm_squared=65) in pairs
    assert [p.norm_squared for p in pairs] == sorted(p.norm_squared for p in pairs)
    assert pairs[0] == PythagoreanPair(a=(0, 5), b=(4, 3), norm_squared=25)


def test_pythagorean_doubles_up_to_nine():
    """(2,9) and (6,7) share norm 85."""
    pairs = find_pythagorean_doubles(9)
    assert PythagoreanPair(a=(2, 9), b=(7, 6), norm_squared=85) in pairs


def test_pythagorean_doubles_are_cached():
    """A second search returns the memoized list."""
    assert find_pythagorean_doubles(6) == find_pythagorean_doubles(6)


def test_pythagorean_doubles_limit():
    """The coordinate bound must be positive."""
    with pytest.raises(PreconditionError):
        find_pythagorean_doubles(0)


def test_pythagorean_pair_validation():
    """Pairs differing by a signed permutation are not doubles."""
    with pytest.raises(ValidationError):
        PythagoreanPair(a=(1, 8), b=(-8, 1), norm_squared=65)
    with pytest.raises(ValidationError):
        PythagoreanPair(a=(1, 8), b=(7, 4), norm_squared=64)


def test_swap_isometry_of_first_example():
    """The reflection exchanging (1,8) and (7,4)."""
    pair = PythagoreanPair(a=(1, 8), b=(7, 4), norm_squared=65)
    T = swap_isometry(pair)
    assert T.A == ((F(-5, 13), F(12, 13)), (F(12, 13), F(5, 13)))
    assert T.b == (0, 0)
    assert T.apply((1, 8)) == (7, 4)
    assert not is_cubical_map(T)
    assert verify_descends(T, pair.a, pair.b)


def test_verify_descends():
    """Only maps preserving the lattice descend to the torus."""
    rotation = RationalOrthoAffine.from_rows([[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]])
    assert not verify_descends(rotation, (1, 0), (0, 1))
    assert verify_descends(RationalOrthoAffine.identity(2), (1, 8), (7, 4))
    with pytest.raises(PreconditionError):
        verify_descends(rotation, (1, 2), (2, 4))


def test_every_double_gives_a_descending_swap():
    """Each double's swap reflection is non-cubical and descends."""
    for pair in find_pythagorean_doubles(5):
        T = swap_isometry(pair)
        assert not is_cubical_map(T)
        assert verify_descends(T, pair.a, pair.b)


# ==============================================================================
# TORI
# ==============================================================================

@pytest.mark.parametrize(
    "a, b, squares",
    [((1, 0), (0, 1), 1), ((2, 0), (0, 2), 4), ((1, 8), (7, 4), 52), ((2, 1), (-1, 2), 5)]
)
def test_torus_square_count(a, b, squares):
    """A torus R^2 / <a, b> has |det(a b)| squares."""
    torus = build_torus(a, b)
    assert torus.squares == squares
    assert len(fundamental_squares(a, b)) == squares
    assert torus.surface.count(1) == 2 * squares
    assert torus.surface.euler_characteristic() == 0
    assert validate(torus.surface).valid
    assert torus.surface.surface


def test_large_torus_is_euclidean():
    """The (1,8),(7,4) torus is flat everywhere."""
    surface = build_torus((1, 8), (7, 4)).surface
    assert set(cone_orders(surface).values()) == {4}
    assert classify_universal_cover(surface).classification == "Euclidean"
    assert check_npc(surface).npc


def test_dependent_lattice_vectors():
    """Dependent vectors do not span a lattice."""
    with pytest.raises(PreconditionError):
        build_torus((1, 2), (2, 4))


def test_sheet_transport_across_lattice_lines():
    """Crossing alpha = 1 upwards applies sigma_a; returning undoes it."""
    sheets = LatticeSheets((1, 0), (0, 1), GENUS_TWO)
    start, end = (F(1, 2), F(1, 2)), (F(3, 2), F(1, 2))
    assert sheets.transport(start, end, 1) == 2
    assert sheets.transport(end, start, 2) == 1
    assert sheets.transport(start, (F(1, 2), F(3, 2)), 2) == 3
    assert sheets.translate_of((F(3, 2), F(-1, 2))) == (1, -1)
    assert sheets.is_lattice_point((3, -4))


# ==============================================================================
# BRANCHED COVERS
# ==============================================================================

def test_trivial_cover_is_the_torus(unit_torus):
    """Degree one with identity permutations returns the torus itself."""
    result = branched_cover(unit_torus, CoverSpec(degree=1, sigma_a=(1,), sigma_b=(1,)))
    assert result.euler_characteristic == 0
    assert result.surface == unit_torus.surface
    assert [p.cone_order for p in result.filled_points] == [4]


def test_genus_two_cover(unit_torus):
    """sigma_a = (1 2), sigma_b = (2 3) gives genus 2 with one cone point of order 12."""
    result = branched_cover(unit_torus, GENUS_TWO)
    surface = result.surface
    assert result.euler_characteristic == -2
    assert perm.cycle_type(result.commutator) == (3,)
    assert perm.cycle_type(result.commutator) == perm.cycle_type(perm.commutator(GENUS_TWO.sigma_a, GENUS_TWO.sigma_b))

    point, = result.filled_points
    assert point.cone_order == 12
    assert sorted(point.sheets) == [1, 2, 3]
    assert cone_orders(surface) == {point.vertex: 12}

    report = classify_universal_cover(surface)
    assert report.classification == "QiHyperbolicPlane"
    assert report.singular_vertices == (point.vertex,)
    assert report.genus == 2
    assert gauss_bonnet(surface).curvature_sum == -8
    assert check_npc(surface).npc


def test_unbranched_double_cover(unit_torus):
    """sigma_a = sigma_b = (1 2) commute, so the double cover is a flat torus."""
    result = branched_cover(unit_torus, CoverSpec(degree=2, sigma_a=(2, 1), sigma_b=(2, 1)))
    assert result.euler_characteristic == 0
    assert [p.cone_order for p in result.filled_points] == [4, 4]
    assert set(cone_orders(result.surface).values()) == {4}


def test_cover_of_a_larger_torus():
    """Covers of the (2,1),(-1,2) torus have five squares per sheet."""
    torus = build_torus((2, 1), (-1, 2))
    result = branched_cover(torus, GENUS_TWO)
    assert result.surface.count(2) == 15
    assert result.euler_characteristic == -2
    orders = cone_orders(result.surface)
    assert sorted(orders.values()).count(12) == 1
    assert set(orders.values()) <= {4, 12}
    assert gauss_bonnet(result.surface).holds


def test_disconnected_cover_is_refused(unit_torus):
    """Non-transitive permutations describe a disconnected cover."""
    with pytest.raises(PreconditionError):
        branched_cover(unit_torus, CoverSpec(degree=3, sigma_a=(2, 1, 3), sigma_b=(1, 2, 3)))


def test_cover_spec_validation():
    """Sheet permutations must permute 1..d."""
    with pytest.raises(ValidationError):
        CoverSpec(degree=3, sigma_a=(1, 1, 2), sigma_b=(1, 2, 3))


# ==============================================================================
# LIFTING AUTOMORPHISMS
# ==============================================================================

def test_identity_always_lifts():
    """The identity automorphism lifts to any cover."""
    report = lift_report(GENUS_TWO, ("a", "b"))
    assert report.lifts
    assert report.inverse == ("a", "b")
    assert report.abelianization_determinant == 1


def test_swap_lifts_when_representations_are_conjugate():
    """Swapping a and b is realized by relabelling sheets 1 and 3."""
    assert lift_check(GENUS_TWO, ("b", "a"))


def test_swap_does_not_lift_for_asymmetric_spec():
    """With sigma_b trivial the swapped action differs."""
    spec = CoverSpec(degree=2, sigma_a=(2, 1), sigma_b=(1, 2))
    assert not lift_check(spec, ("b", "a"))


def test_transvection_inverse():
    """a -> ab, b -> b has inverse a -> aB."""
    inverse = automorphism_inverse((parse_word("ab"), parse_word("b")))
    assert format_word(inverse[0]) == "aB"
    assert substitute(inverse[0], (parse_word("ab"), parse_word("b"))) == parse_word("a")


@pytest.mark.parametrize("images", [("aabA", "b"), ("aa", "b"), ("a", "")])
def test_non_automorphisms_are_rejected(images):
    """Words that do not form a basis are refused."""
    with pytest.raises(PreconditionError):
        lift_report(GENUS_TWO, images)


def test_word_length_bound():
    """Overlong words are outside the search."""
    with pytest.raises(PreconditionError):
        automorphism_inverse((parse_word("ab" * 9), parse_word("b")))


def test_evaluate_word_applies_letters_left_to_right():
    """ab acts as sigma_a followed by sigma_b."""
    assert evaluate_word(parse_word("ab"), (2, 1, 3), (1, 3, 2)) == (3, 1, 2)
    assert evaluate_word(parse_word("aA"), (2, 1, 3), (1, 3, 2)) == (1, 2, 3)
