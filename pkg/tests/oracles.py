"""Independent reference implementations used as test oracles.

Kept deliberately naive and structurally different from the package code:
the step oracle computes each cell's balance by pulling from inverse
vectors, while the engine pushes grains outward. Do not import package
internals here beyond public types.
"""

from __future__ import annotations

from fractions import Fraction
import random


def naive_parallel_step(grains: dict, vectors) -> tuple[dict, frozenset]:
    vectors = list(vectors)
    p = len(vectors)
    fired = frozenset(c for c, g in grains.items() if g >= p)
    candidates = set(grains)
    for (x, y) in fired:
        for dx, dy in vectors:
            candidates.add((x + dx, y + dy))
    new = {}
    for (x, y) in candidates:
        g = grains.get((x, y), 0)
        if (x, y) in fired:
            g -= p
        g += sum(1 for dx, dy in vectors if (x - dx, y - dy) in fired)
        if g:
            new[(x, y)] = g
    return new, fired


def naive_stabilize(grains: dict, vectors, limit: int = 100000):
    grains = {c: g for c, g in grains.items() if g}
    fires: dict = {}
    steps = 0
    while True:
        new, fired = naive_parallel_step(grains, vectors)
        if not fired:
            return grains, fires, steps
        for c in fired:
            fires[c] = fires.get(c, 0) + 1
        grains = new
        steps += 1
        if steps > limit:
            raise AssertionError("oracle stabilization ran away")


def brute_force_disk_neighborhood(center, radius, ratio) -> set:
    """All nonzero lattice (x, y) with (x/ratio, y/ratio) in the closed disk."""
    cx, cy, radius, ratio = (Fraction(v) for v in (*center, radius, ratio))
    bound = int(ratio * (max(abs(cx), abs(cy)) + radius)) + 2
    out = set()
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if (x, y) == (0, 0):
                continue
            if (Fraction(x) / ratio - cx) ** 2 + (Fraction(y) / ratio - cy) ** 2 <= radius**2:
                out.add((x, y))
    return out


def random_symmetric_neighborhood(rng: random.Random, p_min=4, p_max=20):
    """Centrally symmetric neighborhood with p in [p_min, p_max] and a
    non-collinear pair. p is always even here."""
    pool = [
        (dx, dy)
        for dx in range(-3, 4)
        for dy in range(-3, 4)
        if (dx, dy) != (0, 0) and (dx, dy) > (-dx, -dy)
    ]
    while True:
        half = rng.randrange(max(2, p_min // 2), p_max // 2 + 1)
        if half > len(pool):
            continue
        chosen = rng.sample(pool, half)
        vecs = set(chosen) | {(-dx, -dy) for dx, dy in chosen}
        if len(vecs) != 2 * half:
            continue
        first = chosen[0]
        if any(first[0] * v[1] - first[1] * v[0] != 0 for v in vecs):
            return sorted(vecs)


def random_neighborhood(rng: random.Random, p_min=3, p_max=12):
    """General (possibly asymmetric) neighborhood with a non-collinear pair."""
    pool = [
        (dx, dy)
        for dx in range(-3, 4)
        for dy in range(-3, 4)
        if (dx, dy) != (0, 0)
    ]
    while True:
        p = rng.randrange(p_min, p_max + 1)
        vecs = rng.sample(pool, p)
        first = vecs[0]
        if any(first[0] * v[1] - first[1] * v[0] != 0 for v in vecs):
            return sorted(vecs)


def random_configuration(rng: random.Random, box: int, max_grains: int, density: float):
    grains = {}
    for x in range(box):
        for y in range(box):
            if rng.random() < density:
                g = rng.randrange(0, max_grains + 1)
                if g:
                    grains[(x, y)] = g
    return grains
