"""Grain dynamics: parallel and sequential stabilization.

A cell holding at least p grains is active. Firing removes p grains and
sends one along every neighborhood vector. The parallel step fires all
active cells at once; sequential evolution fires one at a time. Both
reach the same stable configuration with the same per-cell firing counts
whenever stabilization terminates, which is what the order-independence
tests pin down.
"""

from __future__ import annotations

import random
from typing import FrozenSet, Tuple

import numpy as np

from .errors import BudgetExhausted, NonConvergent
from .grid import Cell, Configuration, Neighborhood, Odometer

DEFAULT_BUDGET = 10**6

# support size above which stabilize switches to the dense array engine
_DENSE_THRESHOLD = 192


def active_set(config: Configuration, nb: Neighborhood) -> FrozenSet[Cell]:
    """Cells currently able to fire."""
    p = nb.p
    return frozenset(c for c, g in config.items() if g >= p)


def is_stable(config: Configuration, nb: Neighborhood) -> bool:
    p = nb.p
    return all(g < p for g in config.values())


def parallel_step(
    config: Configuration, nb: Neighborhood
) -> Tuple[Configuration, FrozenSet[Cell]]:
    """Fire every active cell once, simultaneously.

    Returns the successor configuration and the set of cells that fired.
    """
    p = nb.p
    fired = [c for c, g in config.items() if g >= p]
    if not fired:
        return config, frozenset()
    grains = dict(config.items())
    for c in fired:
        grains[c] -= p
    vecs = nb.sorted_vectors
    for x, y in fired:
        for dx, dy in vecs:
            w = (x + dx, y + dy)
            grains[w] = grains.get(w, 0) + 1
    return Configuration(grains), frozenset(fired)


def _raise_budget(nb: Neighborhood, steps: int):
    if not nb.has_noncollinear_pair():
        raise NonConvergent(
            "all neighborhood vectors are collinear; stabilization may never halt "
            f"(budget of {steps} steps exhausted)"
        )
    raise BudgetExhausted(f"stabilization budget of {steps} steps exhausted", steps=steps)


def _stabilize_sparse(grains, nb, max_steps, steps, fire_count):
    """Parallel rounds on a dict. Returns (grains, steps) or None when the
    support outgrows the sparse engine."""
    p = nb.p
    vecs = nb.sorted_vectors
    while True:
        fired = [c for c, g in grains.items() if g >= p]
        if not fired:
            return grains, steps
        if steps >= max_steps:
            _raise_budget(nb, steps)
        for c in fired:
            grains[c] -= p
            fire_count[c] = fire_count.get(c, 0) + 1
        for x, y in fired:
            for dx, dy in vecs:
                w = (x + dx, y + dy)
                grains[w] = grains.get(w, 0) + 1
        steps += 1
        if len(grains) > _DENSE_THRESHOLD:
            return None, steps


def _stabilize_dense(grains, nb, max_steps, steps, fire_count):
    p = nb.p
    reach = nb.max_reach()
    pad = reach + 1
    xs = [c[0] for c in grains]
    ys = [c[1] for c in grains]
    ox, oy = min(xs) - pad, min(ys) - pad
    w = max(xs) - min(xs) + 1 + 2 * pad
    h = max(ys) - min(ys) + 1 + 2 * pad
    arr = np.zeros((h, w), dtype=np.int64)
    for (x, y), g in grains.items():
        arr[y - oy, x - ox] = g
    fires = np.zeros_like(arr)
    vecs = nb.sorted_vectors

    while True:
        mask = arr >= p
        if not mask.any():
            break
        if steps >= max_steps:
            _raise_budget(nb, steps)
        yy, xx = np.nonzero(mask)
        # grow the window before any near-edge cell fires out of it
        grow_e = int(xx.max()) >= w - reach
        grow_n = int(yy.min()) < reach
        grow_s = int(yy.max()) >= h - reach
        grow_west = int(xx.min()) < reach
        if grow_west or grow_e or grow_n or grow_s:
            gx = max(reach + 1, w // 3)
            gy = max(reach + 1, h // 3)
            add_w = gx if grow_west else 0
            add_e = gx if grow_e else 0
            add_n = gy if grow_n else 0
            add_s = gy if grow_s else 0
            nw, nh = w + add_w + add_e, h + add_n + add_s
            narr = np.zeros((nh, nw), dtype=np.int64)
            nfires = np.zeros((nh, nw), dtype=np.int64)
            narr[add_n : add_n + h, add_w : add_w + w] = arr
            nfires[add_n : add_n + h, add_w : add_w + w] = fires
            arr, fires = narr, nfires
            ox, oy, w, h = ox - add_w, oy - add_n, nw, nh
            mask = arr >= p
        m = mask.astype(np.int64)
        arr -= p * m
        fires += m
        for dx, dy in vecs:
            dst_y = slice(max(dy, 0), h + min(dy, 0))
            dst_x = slice(max(dx, 0), w + min(dx, 0))
            src_y = slice(max(-dy, 0), h + min(-dy, 0))
            src_x = slice(max(-dx, 0), w + min(-dx, 0))
            arr[dst_y, dst_x] += m[src_y, src_x]
        steps += 1

    out = {}
    for y, x in zip(*np.nonzero(arr)):
        out[(int(x) + ox, int(y) + oy)] = int(arr[y, x])
    for y, x in zip(*np.nonzero(fires)):
        c = (int(x) + ox, int(y) + oy)
        fire_count[c] = fire_count.get(c, 0) + int(fires[y, x])
    return out, steps


def stabilize(
    config: Configuration,
    nb: Neighborhood,
    max_steps: int = DEFAULT_BUDGET,
) -> Tuple[Configuration, Odometer]:
    """Run parallel steps until no cell is active.

    `steps` in the returned odometer counts parallel rounds. Raises
    NonConvergent when the budget runs out under a collinear-only
    neighborhood (which may cycle forever) and BudgetExhausted otherwise.
    """
    grains = dict(config.items())
    fire_count: dict[Cell, int] = {}
    steps = 0
    if len(grains) <= _DENSE_THRESHOLD:
        result, steps = _stabilize_sparse(grains, nb, max_steps, steps, fire_count)
        if result is not None:
            return Configuration(result), Odometer(fire_count, steps)
    result, steps = _stabilize_dense(grains, nb, max_steps, steps, fire_count)
    return Configuration(result), Odometer(fire_count, steps)


def stabilize_sequential(
    config: Configuration,
    nb: Neighborhood,
    order_seed: int = 0,
    max_steps: int | None = None,
) -> Tuple[Configuration, Odometer]:
    """Fire one active cell at a time, chosen uniformly by a seeded RNG.

    The stable result and the per-cell firing counts match the parallel
    engine exactly; only the step count (single firings here) differs.
    """
    rng = random.Random(order_seed)
    p = nb.p
    vecs = nb.sorted_vectors
    grains = dict(config.items())
    unstable = sorted(c for c, g in grains.items() if g >= p)
    pos = {c: i for i, c in enumerate(unstable)}
    fire_count: dict[Cell, int] = {}
    steps = 0

    while unstable:
        if max_steps is not None and steps >= max_steps:
            _raise_budget(nb, steps)
        i = rng.randrange(len(unstable))
        cx, cy = c = unstable[i]
        grains[c] -= p
        fire_count[c] = fire_count.get(c, 0) + 1
        steps += 1
        for dx, dy in vecs:
            v = (cx + dx, cy + dy)
            g = grains.get(v, 0) + 1
            grains[v] = g
            if g >= p and v not in pos:
                pos[v] = len(unstable)
                unstable.append(v)
        if grains[c] < p:
            j = pos.pop(c)
            last = unstable[-1]
            if last != c:
                unstable[j] = last
                pos[last] = j
            unstable.pop()

    return Configuration(grains), Odometer(fire_count, steps)
