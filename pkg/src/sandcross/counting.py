"""Certified ratios for neighborhood growth.

find_ratio_for_count(shape, k) returns a ratio r0 such that EVERY ratio
r >= r0 yields a neighborhood with at least k vectors. Certification has
two tiers: a closed-form bound from an inscribed ball (valid for all
large r), then an exact minimum of the count over the remaining band.

The band minimum is exact because, for a fixed lattice point z, the set
of ratios r with z/r inside the shape is a finite union of closed
intervals whose endpoints are quadratic numbers b + s*sqrt(a) with
rational a, b. Those endpoints are compared exactly, so the count is
piecewise constant between them and can be sampled at rational points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import ceil, floor, isqrt
from typing import Iterable

from .errors import FlatShape
from .exact import Vec, cross, dot, norm2, sqrt_bounds, vsub
from .shapes import (
    ConvexPolygon,
    Disk,
    Shape,
    best_inscribed_ball,
    discretize_count,
    is_non_flat,
)


def _is_square(x: Fraction) -> bool:
    return x >= 0 and isqrt(x.numerator) ** 2 == x.numerator and isqrt(x.denominator) ** 2 == x.denominator


def _sqrt_exact(x: Fraction) -> Fraction:
    return Fraction(isqrt(x.numerator), isqrt(x.denominator))


@dataclass(frozen=True)
class QuadraticNumber:
    """Value b + sign*sqrt(a) with rational a >= 0; exact order predicates."""

    b: Fraction
    a: Fraction
    sign: int = 1

    @staticmethod
    def make(b, a=0, sign=1) -> "QuadraticNumber":
        b, a = Fraction(b), Fraction(a)
        if a < 0:
            raise ValueError("negative radicand")
        if a == 0:
            return QuadraticNumber(b, Fraction(0), 1)
        if _is_square(a):
            return QuadraticNumber(b + sign * _sqrt_exact(a), Fraction(0), 1)
        return QuadraticNumber(b, a, 1 if sign >= 0 else -1)

    @property
    def is_rational(self) -> bool:
        return self.a == 0

    def bounds(self, digits: int) -> tuple[Fraction, Fraction]:
        if self.a == 0:
            return self.b, self.b
        lo, hi = sqrt_bounds(self.a, digits)
        if self.sign > 0:
            return self.b + lo, self.b + hi
        return self.b - hi, self.b - lo


def _qn_equal(x: QuadraticNumber, y: QuadraticNumber) -> bool:
    if x.a == 0 and y.a == 0:
        return x.b == y.b
    if x.a == 0 or y.a == 0:
        # rational == b + s*sqrt(a) with irrational sqrt: impossible
        return False
    d = x.b - y.b
    # need x.sign*sqrt(x.a) - y.sign*sqrt(y.a) == -d
    t_num = x.a + y.a - d * d
    s = x.sign * y.sign
    # sqrt(x.a * y.a) must equal t_num / (2 s)
    if s * t_num <= 0:
        return False
    t = t_num / (2 * s)
    if t * t != x.a * y.a:
        return False
    # sign check of x.sign*sqrt(x.a) - y.sign*sqrt(y.a) vs -d
    if x.sign == y.sign:
        lhs_sign = x.sign * ((x.a > y.a) - (x.a < y.a))
    else:
        lhs_sign = x.sign  # sum of same-signed radicals, both nonzero
    return lhs_sign == ((d < 0) - (d > 0)) and (lhs_sign != 0 or d == 0)


def qn_cmp(x: QuadraticNumber, y: QuadraticNumber) -> int:
    if _qn_equal(x, y):
        return 0
    digits = 12
    while digits <= 6000:
        xlo, xhi = x.bounds(digits)
        ylo, yhi = y.bounds(digits)
        if xlo > yhi:
            return 1
        if xhi < ylo:
            return -1
        digits *= 2
    raise AssertionError("quadratic comparison failed to separate")


def _strict_between(x: QuadraticNumber, y: QuadraticNumber) -> Fraction:
    """A rational strictly between x < y."""
    digits = 12
    while True:
        xlo, xhi = x.bounds(digits)
        ylo, yhi = y.bounds(digits)
        if xhi < ylo:
            return (xhi + ylo) / 2
        digits *= 2


def _disk_intervals(d: Disk, z: Vec):
    """Closed r-intervals on which z/r is inside the disk, as
    (lo, hi) pairs of QuadraticNumber (hi None = unbounded)."""
    A = norm2(d.center) - d.radius**2
    B = -2 * dot(z, d.center)
    C = norm2(z)
    if A == 0:
        if B < 0:
            return [(QuadraticNumber.make(C / -B), None)]
        return []
    disc = B * B - 4 * A * C
    if A > 0:
        if disc < 0:
            return []
        lo = QuadraticNumber.make(Fraction(-B, 2 * A), disc / (4 * A * A), -1)
        hi = QuadraticNumber.make(Fraction(-B, 2 * A), disc / (4 * A * A), 1)
        return [(lo, hi)]
    # A < 0: origin strictly inside, membership holds from the larger root on;
    # sqrt(disc/(4A^2)) = sqrt(disc)/(2|A|), so the larger root takes sign +1
    lo = QuadraticNumber.make(Fraction(-B, 2 * A), disc / (4 * A * A), 1)
    return [(lo, None)]


def _poly_interval(poly: ConvexPolygon, z: Vec):
    """Single closed rational r-interval on which z/r is inside the polygon."""
    vs = poly.vertices
    n = len(vs)
    lo: Fraction | None = None
    hi: Fraction | None = None
    for i in range(n):
        a = vs[i]
        e = vsub(vs[(i + 1) % n], a)
        u = cross(e, z)
        v = cross(e, a)
        # constraint: u - r*v >= 0 for r > 0
        if v == 0:
            if u < 0:
                return []
            continue
        bound = u / v
        if v > 0:
            hi = bound if hi is None or bound < hi else hi
        else:
            lo = bound if lo is None or bound > lo else lo
    if lo is not None and lo < 0:
        lo = Fraction(0)
    if lo is not None and hi is not None and lo > hi:
        return []
    qlo = QuadraticNumber.make(lo) if lo is not None else QuadraticNumber.make(0)
    qhi = QuadraticNumber.make(hi) if hi is not None else None
    return [(qlo, qhi)]


class BandCounter:
    """Exact minimum of discretize_count over ratio intervals up to r_max."""

    def __init__(self, shape: Shape, r_max: Fraction):
        self.shape = shape
        self.r_max = Fraction(r_max)
        minx, miny, maxx, maxy = shape.bbox()
        x_lo = ceil(min(self.r_max * minx, Fraction(0)))
        x_hi = floor(max(self.r_max * maxx, Fraction(0)))
        y_lo = ceil(min(self.r_max * miny, Fraction(0)))
        y_hi = floor(max(self.r_max * maxy, Fraction(0)))
        events: list[QuadraticNumber] = []
        zero = QuadraticNumber.make(0)
        cap = QuadraticNumber.make(self.r_max)
        for x in range(x_lo, x_hi + 1):
            for y in range(y_lo, y_hi + 1):
                if (x, y) == (0, 0):
                    continue
                z = (Fraction(x), Fraction(y))
                for prim in shape.primitives:
                    if isinstance(prim, Disk):
                        ivals = _disk_intervals(prim, z)
                    else:
                        ivals = _poly_interval(prim, z)
                    for lo, hi in ivals:
                        for e in (lo, hi):
                            if e is None:
                                continue
                            if qn_cmp(e, zero) > 0 and qn_cmp(e, cap) <= 0:
                                events.append(e)
        events.sort(key=cmp_to_key(qn_cmp))
        dedup: list[QuadraticNumber] = []
        for e in events:
            if not dedup or qn_cmp(dedup[-1], e) != 0:
                dedup.append(e)
        self.events = dedup

    def events_in(self, r_lo: Fraction, r_hi: Fraction) -> list[QuadraticNumber]:
        qlo = QuadraticNumber.make(r_lo)
        qhi = QuadraticNumber.make(r_hi)
        return [e for e in self.events if qn_cmp(e, qlo) > 0 and qn_cmp(e, qhi) < 0]

    def min_count(self, r_lo: Fraction, r_hi: Fraction) -> int:
        """Exact min of discretize_count over the closed ratio band."""
        r_lo, r_hi = Fraction(r_lo), Fraction(r_hi)
        if not 0 < r_lo <= r_hi <= self.r_max:
            raise ValueError("band must satisfy 0 < r_lo <= r_hi <= r_max")
        inner = self.events_in(r_lo, r_hi)
        chain: list[QuadraticNumber] = (
            [QuadraticNumber.make(r_lo)] + inner + [QuadraticNumber.make(r_hi)]
        )
        samples = {r_lo, r_hi}
        for a, b in zip(chain, chain[1:]):
            if qn_cmp(a, b) < 0:
                samples.add(_strict_between(a, b))
        return min(discretize_count(self.shape, r) for r in sorted(samples))


def _certified_radius(shape: Shape, k: int) -> tuple[Fraction, Fraction]:
    """(r_cert, rho): every r >= r_cert has count >= k, via inscribed ball."""
    center, rho = best_inscribed_ball(shape)
    digits = 16
    while rho == 0:
        # inscribed ball radius underflowed the sqrt precision; retry finer
        digits *= 2
        if digits > 4096:
            raise FlatShape("no positive inscribed ball found")
        center, rho = best_inscribed_ball(shape, digits)
    sqrt2_lo = sqrt_bounds(Fraction(2), 12)[0]

    def certified(r: Fraction) -> bool:
        s = sqrt2_lo * r * rho  # side of an axis square inside the scaled ball
        return s >= 1 and (s - 1) ** 2 - 1 >= k

    r = Fraction(max(1, ceil((1 + isqrt(k + 1) + 1) / float(sqrt2_lo * rho))))
    while not certified(r):
        r *= 2
    return r, rho


def find_ratio_for_count(shape: Shape, k: int, refine_iters: int = 14) -> Fraction:
    """Smallest verified ratio r0 with count >= k for every r >= r0.

    The result is exact when the true threshold is rational (it is an
    event ratio of some lattice point); otherwise it exceeds the
    threshold by at most r_cert / 2**refine_iters.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not is_non_flat(shape):
        raise FlatShape("count growth is only certified for non-flat shapes")
    r_cert, _rho = _certified_radius(shape, k)
    if discretize_count(shape, r_cert) < k:
        raise AssertionError("certified radius failed its own bound")
    counter = BandCounter(shape, r_cert)
    good_hi = r_cert
    # doubling descent while the whole halved band stays feasible;
    # invariant: count >= k is verified on [good_hi, infinity)
    while True:
        half = good_hi / 2
        if half.denominator > 2**24 or not counter.min_count(half, good_hi) >= k:
            bad_lo = half
            break
        good_hi = half
    for _ in range(refine_iters):
        mid = (bad_lo + good_hi) / 2
        if counter.min_count(mid, good_hi) >= k:
            good_hi = mid
        else:
            bad_lo = mid
    # prefer an exact rational event inside the final bracket
    for e in counter.events_in(bad_lo, good_hi):
        if e.is_rational and counter.min_count(e.b, good_hi) >= k:
            return e.b
    return good_hi
