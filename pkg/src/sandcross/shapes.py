"""Continuous shapes and their lattice discretization.

A shape is a finite union of closed primitives (disks and convex
polygons) with exact rational data. Discretizing a shape at ratio r
collects every nonzero lattice vector (x, y) whose scaled copy
(x/r, y/r) lies in the shape; the result is a Neighborhood.

Shape coordinates live in the same axes as the grid (x east, y south).
Polygon vertices must be ordered counter-clockwise with respect to the
shoelace sign convention (non-negative signed area in these axes).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, isqrt
from typing import Callable, Iterable, Sequence, Tuple

from .errors import EmptyNeighborhood, ZeroVector
from .exact import (
    Vec,
    cross,
    dist2,
    dot,
    frac,
    norm2,
    sqrt_bounds,
    vadd,
    vscale,
    vsub,
)
from .grid import Neighborhood


def _vec(v) -> Vec:
    if len(v) != 2:
        raise ValueError(f"2d point expected, got {v!r}")
    return (frac(v[0]), frac(v[1]))


@dataclass(frozen=True)
class Disk:
    center: Vec
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        r = frac(self.radius)
        if r < 0:
            raise ValueError("disk radius must be >= 0")
        object.__setattr__(self, "radius", r)

    def contains(self, point: Vec) -> bool:
        return dist2(point, self.center) <= self.radius**2

    def has_positive_area(self) -> bool:
        return self.radius > 0

    def negated(self) -> "Disk":
        cx, cy = self.center
        return Disk((-cx, -cy), self.radius)

    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        (cx, cy), r = self.center, self.radius
        return cx - r, cy - r, cx + r, cy + r

    def lattice_tester(self, ratio: Fraction) -> Callable[[int, int], bool]:
        """Integer-only membership test for (x/ratio, y/ratio)."""
        rn, rd = ratio.numerator, ratio.denominator
        cx, cy = self.center
        den = cx.denominator * cy.denominator * self.radius.denominator
        # ((x*rd - rn*cx) * den)^2 + (... y ...)^2 <= (radius*rn*den)^2
        a = rd * den
        bx = rn * cx.numerator * (den // cx.denominator)
        by = rn * cy.numerator * (den // cy.denominator)
        c2 = (self.radius.numerator * rn * (den // self.radius.denominator)) ** 2

        def test(x: int, y: int) -> bool:
            return (x * a - bx) ** 2 + (y * a - by) ** 2 <= c2

        return test


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: Tuple[Vec, ...]

    def __post_init__(self):
        vs = tuple(_vec(v) for v in self.vertices)
        if len(vs) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if len(set(vs)) < len(vs):
            raise ValueError("polygon vertices must be distinct")
        n = len(vs)
        signs = set()
        for i in range(n):
            a, b, c = vs[i], vs[(i + 1) % n], vs[(i + 2) % n]
            t = cross(vsub(b, a), vsub(c, b))
            if t:
                signs.add(t > 0)
        if signs == {False} or signs == {True, False}:
            raise ValueError("vertices must be convex and counter-clockwise")
        area2 = sum(cross(vs[i], vs[(i + 1) % n]) for i in range(n))
        if area2 < 0:
            raise ValueError("vertices must be counter-clockwise")
        object.__setattr__(self, "vertices", vs)

    def signed_area2(self) -> Fraction:
        vs = self.vertices
        n = len(vs)
        return sum(cross(vs[i], vs[(i + 1) % n]) for i in range(n))

    def has_positive_area(self) -> bool:
        return self.signed_area2() > 0

    def contains(self, point: Vec) -> bool:
        vs = self.vertices
        n = len(vs)
        if self.has_positive_area():
            return all(
                cross(vsub(vs[(i + 1) % n], vs[i]), vsub(point, vs[i])) >= 0
                for i in range(n)
            )
        # degenerate: all vertices collinear, membership on the hull segment
        lo = min(vs)
        hi = max(vs)
        if cross(vsub(hi, lo), vsub(point, lo)) != 0:
            return False
        t = dot(vsub(point, lo), vsub(hi, lo))
        return 0 <= t <= norm2(vsub(hi, lo))

    def negated(self) -> "ConvexPolygon":
        # point reflection is a rotation, orientation is preserved
        return ConvexPolygon(tuple((-x, -y) for x, y in self.vertices))

    def bbox(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def centroid(self) -> Vec:
        n = len(self.vertices)
        sx = sum(v[0] for v in self.vertices)
        sy = sum(v[1] for v in self.vertices)
        return (sx / n, sy / n)

    def lattice_tester(self, ratio: Fraction) -> Callable[[int, int], bool]:
        if not self.has_positive_area():
            def test_seg(x: int, y: int) -> bool:
                return self.contains((Fraction(x) / ratio, Fraction(y) / ratio))

            return test_seg
        # edge half-plane cross >= 0, cleared to integers:
        # (bx-ax)(y/r - ay) - (by-ay)(x/r - ax) >= 0
        rows = []
        vs = self.vertices
        n = len(vs)
        rn, rd = ratio.numerator, ratio.denominator
        for i in range(n):
            (ax, ay), (bx, by) = vs[i], vs[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            alpha = -ey * Fraction(rd, rn)
            beta = ex * Fraction(rd, rn)
            gamma = ey * ax - ex * ay
            den = alpha.denominator * beta.denominator * gamma.denominator
            rows.append(
                (
                    alpha.numerator * (den // alpha.denominator),
                    beta.numerator * (den // beta.denominator),
                    gamma.numerator * (den // gamma.denominator),
                )
            )

        def test(x: int, y: int) -> bool:
            return all(a * x + b * y + g >= 0 for a, b, g in rows)

        return test


Primitive = Disk | ConvexPolygon


class Shape:
    """Finite union of closed primitives."""

    __slots__ = ("primitives",)

    def __init__(self, primitives: Iterable[Primitive]):
        prims = tuple(primitives)
        if not prims:
            raise ValueError("shape needs at least one primitive")
        for p in prims:
            if not isinstance(p, (Disk, ConvexPolygon)):
                raise ValueError(f"unknown primitive {p!r}")
        self.primitives = prims

    def __eq__(self, other):
        return isinstance(other, Shape) and self.primitives == other.primitives

    def __repr__(self):
        return f"Shape({list(self.primitives)!r})"

    def contains(self, point: Vec) -> bool:
        point = _vec(point)
        return any(p.contains(point) for p in self.primitives)

    def bbox(self):
        boxes = [p.bbox() for p in self.primitives]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )


def unit_disk() -> Shape:
    return Shape([Disk((0, 0), 1)])


def inverse_shape(shape: Shape) -> Shape:
    """Point reflection through the origin."""
    return Shape([p.negated() for p in shape.primitives])


def is_non_flat(shape: Shape) -> bool:
    """True iff every primitive has positive area, so each point of the
    shape sits in some positive-area triangle inside the shape."""
    return all(p.has_positive_area() for p in shape.primitives)


def discretize(shape: Shape, ratio) -> Neighborhood:
    """Nonzero lattice vectors whose copies scaled by 1/ratio lie in the shape."""
    ratio = frac(ratio)
    if ratio <= 0:
        raise ValueError("ratio must be > 0")
    minx, miny, maxx, maxy = shape.bbox()
    x_lo, x_hi = ceil(ratio * minx), floor(ratio * maxx)
    y_lo, y_hi = ceil(ratio * miny), floor(ratio * maxy)
    testers = [p.lattice_tester(ratio) for p in shape.primitives]
    vectors = [
        (x, y)
        for x in range(x_lo, x_hi + 1)
        for y in range(y_lo, y_hi + 1)
        if (x, y) != (0, 0) and any(t(x, y) for t in testers)
    ]
    if not vectors:
        raise EmptyNeighborhood(
            f"no nonzero lattice point of the shape scaled by {ratio}"
        )
    return Neighborhood(vectors)


def discretize_count(shape: Shape, ratio) -> int:
    """len(discretize(...)) that reports 0 instead of raising."""
    try:
        return discretize(shape, ratio).p
    except EmptyNeighborhood:
        return 0


def partition_check(whole: Shape, parts: Sequence[Shape], ratio) -> bool:
    """True iff at this ratio the parts' vector sets are pairwise disjoint
    and their union equals the whole's vector set.

    Note closed parts sharing boundary points fail whenever a lattice
    point scales onto the shared boundary; pick cut lines between lattice
    rows when building partitions.
    """
    ratio = frac(ratio)
    try:
        whole_vecs = set(discretize(whole, ratio).vectors)
    except EmptyNeighborhood:
        whole_vecs = set()
    seen: set = set()
    for part in parts:
        try:
            vecs = set(discretize(part, ratio).vectors)
        except EmptyNeighborhood:
            vecs = set()
        if seen & vecs:
            return False
        seen |= vecs
    return seen == whole_vecs


def _is_perfect_square(x: Fraction) -> bool:
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def _sqrt_exact(x: Fraction) -> Fraction:
    return Fraction(isqrt(x.numerator), isqrt(x.denominator))


def _cmp_plus_sqrt(b1: Fraction, a1: Fraction, b2: Fraction, a2: Fraction) -> int:
    """Exact sign of (b1 + sqrt(a1)) - (b2 + sqrt(a2)), a_i >= 0 rational."""
    if _is_perfect_square(a1):
        b1, a1 = b1 + _sqrt_exact(a1), Fraction(0)
    if _is_perfect_square(a2):
        b2, a2 = b2 + _sqrt_exact(a2), Fraction(0)
    if a1 == a2:
        return (b1 > b2) - (b1 < b2)
    # values cannot be equal now: sqrt(a1)-sqrt(a2) rational forces both
    # square; refine intervals until they separate
    digits = 12
    while True:
        lo1, hi1 = sqrt_bounds(a1, digits)
        lo2, hi2 = sqrt_bounds(a2, digits)
        if b1 + lo1 > b2 + hi2:
            return 1
        if b1 + hi1 < b2 + lo2:
            return -1
        digits *= 2
        if digits > 3000:
            raise AssertionError("sqrt comparison failed to separate")


def _disk_farthest_point(d: Disk) -> Vec:
    """Point of the disk farthest from the origin.

    Exact when |center| is rational; otherwise a rational point within
    1e-12 of the supremum, still inside the disk.
    """
    c = d.center
    if c == (0, 0) or d.radius == 0:
        return vadd(c, (d.radius, Fraction(0)))
    a = norm2(c)
    if _is_perfect_square(a):
        t = 1 + d.radius / _sqrt_exact(a)
        return vscale(t, c)
    lo, hi = sqrt_bounds(a, 15)
    t = 1 + d.radius / hi
    return vscale(t, c)


def longest_vector(shape: Shape) -> Vec:
    """A point of the shape at maximal distance from the origin.

    Ties break lexicographically (largest x, then largest y). For a disk
    whose center has irrational norm the returned point is a rational
    inner approximation within 1e-12 of the supremum.
    """
    best_key = None
    keep: list[Primitive] = []
    candidates: list[Vec] = []
    for p in shape.primitives:
        if isinstance(p, Disk):
            # sup distance = radius + sqrt(|center|^2)
            sup = (p.radius, norm2(p.center))
        else:
            sup = (Fraction(0), max(norm2(v) for v in p.vertices))
        if best_key is None:
            best_key = sup
            keep = [p]
            continue
        c = _cmp_plus_sqrt(sup[0], sup[1], best_key[0], best_key[1])
        if c > 0:
            best_key = sup
            keep = [p]
        elif c == 0:
            keep.append(p)
    for p in keep:
        if isinstance(p, Disk):
            candidates.append(_disk_farthest_point(p))
        else:
            m = max(norm2(v) for v in p.vertices)
            candidates.extend(v for v in p.vertices if norm2(v) == m)
    return max(candidates)


def max_orthogonal_vector(shape: Shape, h: Vec) -> Vec:
    """A point of the shape with maximal distance from the line through the
    origin along h. Ties break lexicographically.

    For disks the attaining point is exact when |h| is rational, else a
    rational inner approximation within 1e-12 of the supremum.
    """
    h = _vec(h)
    if h == (0, 0):
        raise ZeroVector("direction for orthogonal maximization is zero")
    hn2 = norm2(h)
    best_key = None
    keep: list[Primitive] = []
    for p in shape.primitives:
        if isinstance(p, Disk):
            # sup of |cross(h, v)| / |h| = |cross(h,c)|/|h| + radius
            sup = (p.radius, cross(h, p.center) ** 2 / hn2)
        else:
            m = max(cross(h, v) ** 2 for v in p.vertices)
            sup = (Fraction(0), m / hn2)
        if best_key is None:
            best_key, keep = sup, [p]
            continue
        c = _cmp_plus_sqrt(sup[0], sup[1], best_key[0], best_key[1])
        if c > 0:
            best_key, keep = sup, [p]
        elif c == 0:
            keep.append(p)
    candidates: list[Vec] = []
    perp = (-h[1], h[0])
    for p in keep:
        if isinstance(p, Disk):
            if p.radius == 0:
                candidates.append(p.center)
                continue
            side = cross(h, p.center)
            if _is_perfect_square(hn2):
                step = vscale(p.radius / _sqrt_exact(hn2), perp)
            else:
                lo, hi = sqrt_bounds(hn2, 15)
                step = vscale(p.radius / hi, perp)
            if side > 0:
                candidates.append(vadd(p.center, step))
            elif side < 0:
                candidates.append(vsub(p.center, step))
            else:
                candidates.append(max(vadd(p.center, step), vsub(p.center, step)))
        else:
            m = max(cross(h, v) ** 2 for v in p.vertices)
            candidates.extend(v for v in p.vertices if cross(h, v) ** 2 == m)
    return max(candidates)


def ball_in_shape(shape: Shape, center: Vec, rho) -> bool:
    """True iff some single primitive contains the closed ball B(center, rho)."""
    center = _vec(center)
    rho = frac(rho)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    for p in shape.primitives:
        if isinstance(p, Disk):
            if rho <= p.radius and dist2(center, p.center) <= (p.radius - rho) ** 2:
                return True
        else:
            if not p.has_positive_area():
                if rho == 0 and p.contains(center):
                    return True
                continue
            vs = p.vertices
            n = len(vs)
            ok = True
            for i in range(n):
                e = vsub(vs[(i + 1) % n], vs[i])
                c = cross(e, vsub(center, vs[i]))
                if c < 0 or c * c < rho * rho * norm2(e):
                    ok = False
                    break
            if ok:
                return True
    return False


def best_inscribed_ball(shape: Shape, digits: int = 12) -> tuple[Vec, Fraction]:
    """A rational center and radius of some inscribed ball, the larger the
    better (disk: itself; polygon: centroid with exact edge clearance)."""
    best: tuple[Vec, Fraction] | None = None
    for p in shape.primitives:
        if isinstance(p, Disk):
            cand = (p.center, p.radius)
        else:
            if not p.has_positive_area():
                continue
            c = p.centroid()
            vs = p.vertices
            n = len(vs)
            d2 = min(
                cross(vsub(vs[(i + 1) % n], vs[i]), vsub(c, vs[i])) ** 2
                / norm2(vsub(vs[(i + 1) % n], vs[i]))
                for i in range(n)
            )
            cand = (c, sqrt_bounds(d2, digits)[0])
        if best is None or cand[1] > best[1]:
            best = cand
    if best is None:
        return ((Fraction(0), Fraction(0)), Fraction(0))
    return best


def norm_sup_bound(shape: Shape) -> Fraction:
    """Rational upper bound on sup |v| over the shape (within 1e-12)."""
    out = Fraction(0)
    for p in shape.primitives:
        if isinstance(p, Disk):
            hi = sqrt_bounds(norm2(p.center), 15)[1] + p.radius
        else:
            hi = max(sqrt_bounds(norm2(v), 15)[1] for v in p.vertices)
        out = max(out, hi)
    return out
