"""Exact rational plane arithmetic used by the geometry layers.

All coordinates are `fractions.Fraction`; nothing here touches binary
floats, so every predicate is decidable and reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

Vec = tuple[Fraction, Fraction]

ZERO2: Vec = (Fraction(0), Fraction(0))


def frac(value) -> Fraction:
    """Coerce an int / Fraction / exact string ("p/q" or decimal) to Fraction.

    Binary floats are rejected: JSON readers must convert float literals
    through their decimal spelling before they get here.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact coordinate expected, got {type(value).__name__}")


def format_frac(x: Fraction):
    """Shortest exact JSON form: int, finite-decimal string, or "p/q"."""
    x = Fraction(x)
    if x.denominator == 1:
        return int(x)
    den = x.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = abs(x.numerator) * 10**digits // x.denominator
        body = str(scaled).rjust(digits + 1, "0")
        out = body[:-digits] + "." + body[-digits:]
        return "-" + out if x < 0 else out
    return f"{x.numerator}/{x.denominator}"


def vadd(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def vsub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def vscale(t, a: Vec) -> Vec:
    t = Fraction(t)
    return (t * a[0], t * a[1])


def dot(a: Vec, b: Vec) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Vec, b: Vec) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def norm2(a: Vec) -> Fraction:
    return a[0] * a[0] + a[1] * a[1]


def dist2(a: Vec, b: Vec) -> Fraction:
    return norm2(vsub(a, b))


def dist2_point_line(point: Vec, origin: Vec, direction: Vec) -> Fraction:
    """Squared distance from `point` to the infinite line origin + t*direction."""
    if direction == ZERO2:
        raise ValueError("line direction is zero")
    c = cross(direction, vsub(point, origin))
    return c * c / norm2(direction)


def sqrt_bounds(x: Fraction, digits: int = 12) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(x) <= hi with hi - lo <= 10**-digits (x >= 0)."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of negative")
    if x == 0:
        return Fraction(0), Fraction(0)
    # sqrt(p/q) = sqrt(p*q) / q, bracket the integer sqrt at scale k
    m = x.numerator * x.denominator
    k = 10**digits
    a = isqrt(m * k * k)
    lo = Fraction(a, k * x.denominator)
    hi = Fraction(a + 1, k * x.denominator)
    return lo, hi


def sign(x) -> int:
    return (x > 0) - (x < 0)


def orient(a: Vec, b: Vec, c: Vec) -> int:
    """Sign of the turn a->b->c: +1 counter-clockwise in math axes."""
    return sign(cross(vsub(b, a), vsub(c, a)))


def open_segments_cross(a1: Vec, a2: Vec, b1: Vec, b2: Vec) -> bool:
    """True iff the open segments ]a1,a2[ and ]b1,b2[ cross properly."""
    d1 = orient(a1, a2, b1)
    d2 = orient(a1, a2, b2)
    d3 = orient(b1, b2, a1)
    d4 = orient(b1, b2, a2)
    return d1 * d2 < 0 and d3 * d4 < 0


def convex_hull(points: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain hull of integer points, counter-clockwise, no duplicates."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out: list[tuple[int, int]] = []
        for p in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def point_in_hull(p: tuple[int, int], hull: Sequence[tuple[int, int]]) -> bool:
    """Point-in-convex-polygon for a ccw hull (closed: boundary counts)."""
    if not hull:
        return False
    if len(hull) == 1:
        return p == hull[0]
    if len(hull) == 2:
        (x1, y1), (x2, y2) = hull
        c = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
        if c != 0:
            return False
        return min(x1, x2) <= p[0] <= max(x1, x2) and min(y1, y2) <= p[1] <= max(y1, y2)
    for i in range(len(hull)):
        a = hull[i]
        b = hull[(i + 1) % len(hull)]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
            return False
    return True
