"""Core grid types: neighborhoods, configurations, odometers.

Grid convention used across the package: cells are integer pairs (x, y),
x grows eastward and y grows SOUTHWARD, so row y=0 of a square is its
north border and column x=0 its west border. Renderers and border
positioning rely on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Tuple

from .exact import convex_hull, point_in_hull

Cell = Tuple[int, int]


def _check_cell(v) -> Cell:
    if (
        not isinstance(v, tuple)
        or len(v) != 2
        or not isinstance(v[0], int)
        or not isinstance(v[1], int)
        or isinstance(v[0], bool)
        or isinstance(v[1], bool)
    ):
        raise ValueError(f"grid cell must be a pair of ints, got {v!r}")
    return v


class Neighborhood:
    """A finite set of nonzero integer movement vectors.

    The threshold p equals the number of vectors: a cell holding at least
    p grains is active and fires by sending one grain along every vector.
    """

    __slots__ = ("_vectors", "_sorted", "_hash")

    def __init__(self, vectors: Iterable[Cell]):
        vs = frozenset(_check_cell(tuple(v)) for v in vectors)
        if not vs:
            raise ValueError("neighborhood needs at least one vector")
        if (0, 0) in vs:
            raise ValueError("neighborhood may not contain (0, 0)")
        self._vectors: FrozenSet[Cell] = vs
        self._sorted: tuple[Cell, ...] = tuple(sorted(vs))
        self._hash = hash(self._vectors)

    @property
    def vectors(self) -> FrozenSet[Cell]:
        return self._vectors

    @property
    def sorted_vectors(self) -> tuple[Cell, ...]:
        return self._sorted

    @property
    def p(self) -> int:
        return len(self._vectors)

    def __contains__(self, v: Cell) -> bool:
        return v in self._vectors

    def __iter__(self) -> Iterator[Cell]:
        return iter(self._sorted)

    def __len__(self) -> int:
        return len(self._vectors)

    def __eq__(self, other) -> bool:
        return isinstance(other, Neighborhood) and self._vectors == other._vectors

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Neighborhood(p={self.p}, vectors={list(self._sorted)!r})"

    def inverse(self) -> "Neighborhood":
        """Point reflection through the origin (senders become receivers)."""
        return Neighborhood((-dx, -dy) for dx, dy in self._vectors)

    def is_symmetric(self) -> bool:
        """True iff the neighborhood equals its own inverse."""
        return all((-dx, -dy) in self._vectors for dx, dy in self._vectors)

    def has_noncollinear_pair(self) -> bool:
        """True iff two vectors span the plane; guarantees stabilization halts."""
        first = self._sorted[0]
        return any(
            first[0] * v[1] - first[1] * v[0] != 0 for v in self._sorted[1:]
        )

    def is_convex(self) -> bool:
        """True iff every lattice point of the hull of vectors+origin is a
        vector (or the origin)."""
        pts = list(self._vectors) + [(0, 0)]
        hull = convex_hull(pts)
        xs = [p[0] for p in hull]
        ys = [p[1] for p in hull]
        members = self._vectors | {(0, 0)}
        for x in range(min(xs), max(xs) + 1):
            for y in range(min(ys), max(ys) + 1):
                if point_in_hull((x, y), hull) and (x, y) not in members:
                    return False
        return True

    def max_reach(self) -> int:
        """Chebyshev radius of the vector set (window padding for engines)."""
        return max(max(abs(dx), abs(dy)) for dx, dy in self._vectors)

    def primitive_directions(self) -> FrozenSet[Cell]:
        dirs = set()
        for dx, dy in self._vectors:
            g = gcd(abs(dx), abs(dy))
            dirs.add((dx // g, dy // g))
        return frozenset(dirs)


def von_neumann(radius: int = 1) -> Neighborhood:
    """Diamond |dx|+|dy| <= radius without the origin."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    return Neighborhood(
        (dx, dy)
        for dx in range(-radius, radius + 1)
        for dy in range(-radius, radius + 1)
        if 0 < abs(dx) + abs(dy) <= radius
    )


def moore(radius: int = 1) -> Neighborhood:
    """Square max(|dx|,|dy|) <= radius without the origin."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    return Neighborhood(
        (dx, dy)
        for dx in range(-radius, radius + 1)
        for dy in range(-radius, radius + 1)
        if (dx, dy) != (0, 0)
    )


class Configuration(Mapping[Cell, int]):
    """Finitely supported map cell -> grain count (non-negative ints).

    Zero counts are elided on construction so equal configurations compare
    equal regardless of how they were assembled.
    """

    __slots__ = ("_grains",)

    def __init__(self, grains: Mapping[Cell, int] | Iterable[tuple[Cell, int]] = ()):
        items = grains.items() if isinstance(grains, Mapping) else grains
        store: Dict[Cell, int] = {}
        for cell, g in items:
            cell = _check_cell(tuple(cell))
            if not isinstance(g, int) or isinstance(g, bool):
                raise ValueError(f"grain count must be an int, got {g!r}")
            if g < 0:
                raise ValueError(f"grain count must be >= 0, got {g} at {cell}")
            if g:
                store[cell] = store.get(cell, 0) + g
        self._grains = store

    def __getitem__(self, cell: Cell) -> int:
        return self._grains.get(cell, 0)

    def get(self, cell: Cell, default: int = 0) -> int:
        return self._grains.get(cell, default)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self._grains)

    def __len__(self) -> int:
        return len(self._grains)

    def __contains__(self, cell) -> bool:
        return cell in self._grains

    def __eq__(self, other) -> bool:
        if isinstance(other, Configuration):
            return self._grains == other._grains
        if isinstance(other, Mapping):
            return self._grains == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __repr__(self) -> str:
        cells = dict(sorted(self._grains.items()))
        return f"Configuration({cells!r})"

    @property
    def support(self) -> FrozenSet[Cell]:
        return frozenset(self._grains)

    def total_grains(self) -> int:
        return sum(self._grains.values())

    def sorted_items(self) -> list[tuple[Cell, int]]:
        return sorted(self._grains.items())

    def add(self, other: "Configuration") -> "Configuration":
        """Cellwise sum (grain counts add; supports union)."""
        merged = dict(self._grains)
        for cell, g in other.items():
            merged[cell] = merged.get(cell, 0) + g
        return Configuration(merged)

    def translate(self, dx: int, dy: int) -> "Configuration":
        return Configuration({(x + dx, y + dy): g for (x, y), g in self._grains.items()})

    def bounding_box(self) -> tuple[int, int, int, int] | None:
        """(min_x, min_y, max_x, max_y) of the support, None when empty."""
        if not self._grains:
            return None
        xs = [c[0] for c in self._grains]
        ys = [c[1] for c in self._grains]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class Odometer:
    """How often each cell fired during a stabilization, plus step count.

    `steps` counts parallel rounds for the parallel engine and single
    firings for the sequential engine. Cells that never fired are elided.
    """

    fire_count: Mapping[Cell, int] = field(default_factory=dict)
    steps: int = 0

    def __post_init__(self):
        cleaned = {c: n for c, n in self.fire_count.items() if n}
        object.__setattr__(self, "fire_count", cleaned)

    def total_firings(self) -> int:
        return sum(self.fire_count.values())

    def max_firings(self) -> int:
        return max(self.fire_count.values(), default=0)
