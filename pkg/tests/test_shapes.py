from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sandcross import von_neumann
from sandcross.errors import EmptyNeighborhood, ZeroVector
from sandcross.shapes import (
    ConvexPolygon,
    Disk,
    Shape,
    ball_in_shape,
    best_inscribed_ball,
    discretize,
    discretize_count,
    inverse_shape,
    is_non_flat,
    longest_vector,
    max_orthogonal_vector,
    norm_sup_bound,
    partition_check,
    unit_disk,
)

from oracles import brute_force_disk_neighborhood


RATIOS = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(7, 2), Fraction(29, 4), Fraction(10)]


def test_unit_disk_ratio_one_is_von_neumann():
    assert discretize(unit_disk(), 1) == von_neumann(1)


def test_unit_disk_brute_force_across_ratios():
    for r in RATIOS:
        expected = brute_force_disk_neighborhood((0, 0), 1, r)
        if expected:
            assert set(discretize(unit_disk(), r).vectors) == expected, r
        else:
            with pytest.raises(EmptyNeighborhood):
                discretize(unit_disk(), r)


def test_offcenter_disk_brute_force():
    d = Shape([Disk((Fraction(3, 2), Fraction(-1, 2)), Fraction(5, 4))])
    for r in RATIOS:
        expected = brute_force_disk_neighborhood((Fraction(3, 2), Fraction(-1, 2)), Fraction(5, 4), r)
        if expected:
            assert set(discretize(d, r).vectors) == expected
        else:
            with pytest.raises(EmptyNeighborhood):
                discretize(d, r)


def test_triangle_discretization_frozen():
    tri = Shape([ConvexPolygon(((0, 0), (2, 0), (0, 2)))])
    nb = discretize(tri, 1)
    assert set(nb.vectors) == {(1, 0), (2, 0), (0, 1), (1, 1), (0, 2)}


def test_discretize_boundary_is_closed():
    # lattice point exactly on the boundary circle must be included
    nb = discretize(unit_disk(), 5)
    assert (3, 4) in nb.vectors and (5, 0) in nb.vectors


def test_empty_neighborhood_raised():
    s = Shape([Disk((Fraction(1, 2), Fraction(1, 2)), Fraction(1, 10))])
    with pytest.raises(EmptyNeighborhood):
        discretize(s, 1)


def test_polygon_validation():
    with pytest.raises(ValueError):
        ConvexPolygon(((0, 0), (1, 0)))
    with pytest.raises(ValueError):  # clockwise
        ConvexPolygon(((0, 0), (0, 2), (2, 0)))
    with pytest.raises(ValueError):  # reflex corner
        ConvexPolygon(((0, 0), (2, 0), (1, Fraction(1, 10)), (2, 2)))
    # degenerate but constructible: collinear vertices
    seg = ConvexPolygon(((0, 0), (1, 1), (2, 2)))
    assert not seg.has_positive_area()
    assert seg.contains((Fraction(1, 2), Fraction(1, 2)))
    assert not seg.contains((1, 0))


def test_is_non_flat():
    assert is_non_flat(unit_disk())
    assert not is_non_flat(Shape([Disk((0, 0), 0)]))
    assert not is_non_flat(Shape([ConvexPolygon(((0, 0), (1, 1), (2, 2)))]))
    assert not is_non_flat(
        Shape([Disk((0, 0), 1), ConvexPolygon(((0, 0), (1, 1), (2, 2)))])
    )


def test_longest_vector_frozen_examples():
    assert longest_vector(unit_disk()) == (1, 0)
    assert longest_vector(Shape([Disk((2, 0), 1)])) == (3, 0)
    tri = Shape([ConvexPolygon(((0, 0), (2, 0), (0, 2)))])
    assert longest_vector(tri) == (2, 0)  # tie with (0,2) broken by larger x
    both = Shape([Disk((2, 0), 1), ConvexPolygon(((0, 0), (2, 0), (0, 2)))])
    assert longest_vector(both) == (3, 0)


def test_longest_vector_irrational_center_is_close_and_inside():
    s = Shape([Disk((1, 1), Fraction(1, 2))])
    v = longest_vector(s)
    assert s.contains(v)
    # |v| within 1e-9 of sqrt(2)+1/2
    from math import hypot

    assert abs(hypot(float(v[0]), float(v[1])) - (2**0.5 + 0.5)) < 1e-9


def test_max_orthogonal_vector_frozen():
    assert max_orthogonal_vector(unit_disk(), (1, 0)) == (0, 1)
    tri = Shape([ConvexPolygon(((0, 0), (2, 0), (0, 2)))])
    assert max_orthogonal_vector(tri, (1, 0)) == (0, 2)
    with pytest.raises(ZeroVector):
        max_orthogonal_vector(unit_disk(), (0, 0))


def test_inverse_shape_involution_and_commutes():
    s = Shape(
        [
            Disk((Fraction(3, 2), -1), Fraction(3, 4)),
            ConvexPolygon(((0, 0), (2, 1), (1, 3))),
        ]
    )
    assert inverse_shape(inverse_shape(s)) == s
    for r in (1, 2, Fraction(7, 2)):
        assert discretize(inverse_shape(s), r) == discretize(s, r).inverse()


def test_partition_check_cut_between_lattice_rows():
    whole = Shape([ConvexPolygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))])
    cut = Fraction(1, 4)
    left = Shape([ConvexPolygon(((-1, -1), (cut, -1), (cut, 1), (-1, 1)))])
    right = Shape([ConvexPolygon(((cut, -1), (1, -1), (1, 1), (cut, 1)))])
    assert partition_check(whole, [left, right], 2)
    # cutting on a lattice column duplicates boundary points
    bad_left = Shape([ConvexPolygon(((-1, -1), (Fraction(1, 2), -1), (Fraction(1, 2), 1), (-1, 1)))])
    bad_right = Shape([ConvexPolygon(((Fraction(1, 2), -1), (1, -1), (1, 1), (Fraction(1, 2), 1)))])
    assert not partition_check(whole, [bad_left, bad_right], 2)


def test_partition_union_must_cover():
    whole = Shape([ConvexPolygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))])
    left = Shape([ConvexPolygon(((-1, -1), (Fraction(1, 4), -1), (Fraction(1, 4), 1), (-1, 1)))])
    assert not partition_check(whole, [left], 2)


def test_ball_in_shape():
    assert ball_in_shape(unit_disk(), (0, 0), 1)
    assert ball_in_shape(unit_disk(), (Fraction(1, 2), 0), Fraction(1, 2))
    assert not ball_in_shape(unit_disk(), (Fraction(1, 2), 0), Fraction(3, 5))
    sq = Shape([ConvexPolygon(((0, 0), (4, 0), (4, 4), (0, 4)))])
    assert ball_in_shape(sq, (2, 2), 2)
    assert not ball_in_shape(sq, (2, 2), Fraction(21, 10))
    assert ball_in_shape(sq, (1, 1), 1)
    assert not ball_in_shape(sq, (1, 1), Fraction(11, 10))


def test_best_inscribed_ball_and_sup_bound():
    c, rho = best_inscribed_ball(unit_disk())
    assert c == (0, 0) and rho == 1
    assert norm_sup_bound(unit_disk()) >= 1
    sq = Shape([ConvexPolygon(((0, 0), (4, 0), (4, 4), (0, 4)))])
    c, rho = best_inscribed_ball(sq)
    assert c == (2, 2) and Fraction(19, 10) < rho <= 2
    b = norm_sup_bound(sq)
    assert b * b >= 32 and float(b) < 32**0.5 + 1e-9


fracs = st.fractions(min_value=-3, max_value=3, max_denominator=8)


@settings(max_examples=50, deadline=None)
@given(cx=fracs, cy=fracs, r=st.fractions(min_value=Fraction(1, 8), max_value=2, max_denominator=8),
       ratio=st.fractions(min_value=Fraction(1, 2), max_value=4, max_denominator=4))
def test_disk_discretization_matches_bruteforce(cx, cy, r, ratio):
    expected = brute_force_disk_neighborhood((cx, cy), r, ratio)
    s = Shape([Disk((cx, cy), r)])
    assert set(discretize(s, ratio).vectors) == expected if expected else True
    assert discretize_count(s, ratio) == len(expected)


@settings(max_examples=40, deadline=None)
@given(
    pts=st.lists(st.tuples(fracs, fracs), min_size=3, max_size=3),
    ratio=st.fractions(min_value=Fraction(1, 2), max_value=3, max_denominator=4),
)
def test_triangle_membership_matches_bruteforce(pts, ratio):
    a, b, c = pts
    area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if area2 == 0:
        return
    if area2 < 0:
        a, b, c = a, c, b
    tri = ConvexPolygon((a, b, c))
    s = Shape([tri])
    bound = 3 * max(1, int(ratio) + 1) * 2
    expected = {
        (x, y)
        for x in range(-bound, bound + 1)
        for y in range(-bound, bound + 1)
        if (x, y) != (0, 0)
        and tri.contains((Fraction(x) / ratio, Fraction(y) / ratio))
    }
    assert discretize_count(s, ratio) == len(expected)
    if expected:
        assert set(discretize(s, ratio).vectors) == expected
