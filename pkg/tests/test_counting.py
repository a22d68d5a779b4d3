from fractions import Fraction

import pytest

from sandcross.counting import BandCounter, QuadraticNumber, find_ratio_for_count, qn_cmp
from sandcross.errors import FlatShape
from sandcross.shapes import ConvexPolygon, Disk, Shape, discretize_count, unit_disk


def q(b, a=0, sign=1):
    return QuadraticNumber.make(Fraction(b), Fraction(a), sign)


def test_quadratic_number_normalization():
    assert q(2) == q(0, 4)  # sqrt(4) folds to rational 2
    assert q(1, 2).is_rational is False
    assert q(Fraction(3, 2), Fraction(9, 4)).is_rational  # sqrt(9/4) = 3/2


def test_quadratic_number_comparisons():
    assert qn_cmp(q(0, 2), q(1)) > 0          # sqrt(2) > 1
    assert qn_cmp(q(0, 2), q(2)) < 0          # sqrt(2) < 2
    assert qn_cmp(q(3, 8, -1), q(0, 2)) < 0   # 3 - 2sqrt(2) ~ 0.17 < sqrt(2)
    assert qn_cmp(q(1, 2), q(1, 2)) == 0
    assert qn_cmp(q(0, 8), q(0, 2)) > 0       # 2sqrt(2) > sqrt(2)
    # equality with different presentations: 1 + sqrt(2) vs sqrt(2) + 1
    assert qn_cmp(q(1, 2, 1), q(1, 2, 1)) == 0
    # sqrt(8) - sqrt(2) == sqrt(2): cross-presentation equality
    assert qn_cmp(q(0, 8, 1), q(0, 2, 1)) != 0
    x = QuadraticNumber.make(Fraction(0), Fraction(8), 1)     # 2sqrt2
    y = QuadraticNumber.make(Fraction(2) * 0, Fraction(2), 1)  # sqrt2
    assert qn_cmp(x, y) == 1


def test_band_counter_unit_disk():
    counter = BandCounter(unit_disk(), Fraction(3))
    assert counter.min_count(Fraction(1, 2), Fraction(9, 10)) == 0
    assert counter.min_count(Fraction(1), Fraction(3)) == 4
    assert counter.min_count(Fraction(3, 2), Fraction(3)) == 8
    assert counter.min_count(Fraction(2), Fraction(3)) == 12


def test_find_ratio_unit_disk_k1_is_exactly_one():
    assert find_ratio_for_count(unit_disk(), 1) == 1


def test_find_ratio_unit_disk_k10_is_exactly_two():
    # counts jump 8 -> 12 when (2,0) etc. enter at ratio 2
    assert find_ratio_for_count(unit_disk(), 10) == 2


def test_find_ratio_flat_shape_raises():
    with pytest.raises(FlatShape):
        find_ratio_for_count(Shape([ConvexPolygon(((0, 0), (1, 1), (2, 2)))]), 3)


def test_find_ratio_certifies_tail_samples():
    s = Shape([Disk((Fraction(1, 2), Fraction(1, 2)), Fraction(3, 4))])
    for k in (1, 10, 25):
        r0 = find_ratio_for_count(s, k)
        for i in range(12):
            r = r0 + Fraction(i, 7) + Fraction(i * i, 50)
            assert discretize_count(s, r) >= k, (k, r0, r)


def test_find_ratio_square_shape():
    sq = Shape([ConvexPolygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))])
    r0 = find_ratio_for_count(sq, 8)
    # a 2x2 square at ratio 1 already holds 8 nonzero lattice points
    assert r0 <= 1
    for r in (r0, r0 + Fraction(1, 3), 2 * r0, 5 * r0):
        assert discretize_count(sq, r) >= 8
