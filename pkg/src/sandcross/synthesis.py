"""Constructive synthesis of crossing configurations for scaled shapes.

Pipeline: choose continuous movement vectors for the two transport
directions (plan), realize the central junction on the lattice at ratio
r (gadget), grow feeder and escape wires out to the four borders
(wires), assemble a configuration, and verify it end to end.

Everything is laid out in junction coordinates first (the junction's
west anchor at the origin, west run travelling +x'ish along the longest
vector, north run travelling +y'ish along the crossing axis) and only
translated into the square at assembly time. All continuous data is
exact rational. No lattice relation is ever inferred from the
continuous picture: membership in the scaled neighborhood is re-checked
cell by cell, and the final configuration must pass verify_crossing
before synthesize returns.

Orientation: the construction needs the longest vector to make eastward
progress and the orthogonal axis to make southward progress (y grows
southward). Shapes oriented otherwise raise GeometryConflict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

from .counting import find_ratio_for_count
from .crossing import CrossingSpec, verify_crossing
from .errors import (
    EmptyNeighborhood,
    FlatShape,
    GeometryConflict,
    NoRatioFound,
    PlanFailure,
    RatioTooSmall,
    SynthesisBug,
)
from .exact import (
    Vec,
    cross,
    dist2,
    dot,
    format_frac,
    frac,
    norm2,
    open_segments_cross,
    sqrt_bounds,
    vadd,
    vscale,
    vsub,
)
from .grid import Cell, Configuration, Neighborhood
from .shapes import Disk, Shape, ball_in_shape, discretize, is_non_flat
from .shapes import longest_vector, max_orthogonal_vector

ORIGIN: Vec = (Fraction(0), Fraction(0))

# candidate ladders for the quadrant case: tall crossing vectors first
# (a tall vector relaxes the offset bound), then sliding east
_BETAS = [Fraction(31, 32), Fraction(15, 16), Fraction(7, 8), Fraction(3, 4),
          Fraction(5, 8), Fraction(1, 2), Fraction(3, 8), Fraction(1, 4),
          Fraction(1, 8)]
_ALPHAS = [Fraction(1, 32), Fraction(1, 16), Fraction(1, 8), Fraction(3, 16),
           Fraction(1, 4), Fraction(3, 8), Fraction(1, 2), Fraction(5, 8),
           Fraction(3, 4)]
_RHOS = [Fraction(1, 16), Fraction(1, 32), Fraction(1, 64), Fraction(1, 128),
         Fraction(1, 256)]

FAN_PULLIN = Fraction(1, 8)  # west fan anchor sits at -(1 - this) * h


@dataclass(frozen=True)
class Gadget:
    """Junction cells: two-cell west trigger, four-cell north trigger,
    and the two output cells they race for."""

    H1: tuple[Cell, Cell]
    V1: tuple[Cell, Cell, Cell, Cell]
    h2: Cell
    v2: Cell

    def cells(self) -> tuple[Cell, ...]:
        return self.H1 + self.V1 + (self.h2, self.v2)

    def grain_levels(self, p: int) -> dict[Cell, int]:
        out = {c: p - 6 for c in self.H1}
        out.update({c: p - 4 for c in self.V1})
        out[self.h2] = p - 2
        out[self.v2] = p - 4
        return out


@dataclass(frozen=True)
class WireStage:
    name: str
    cells: tuple[Cell, ...]
    grains: int


@dataclass(frozen=True)
class Wires:
    stages: tuple[WireStage, ...]
    n: int
    shift: Cell  # translation applied to junction coordinates
    north: int
    east: int
    south: int
    west: int

    def cell_grains(self) -> dict[Cell, int]:
        out: dict[Cell, int] = {}
        for st in self.stages:
            for c in st.cells:
                out[c] = st.grains
        return out


@dataclass(frozen=True)
class CrossingPlan:
    """Continuous vectors plus (once materialized) the lattice data."""

    h: Vec
    v_e: Vec
    s2_y: Vec
    v: Vec
    v1_anchor: Vec
    epsilon: Fraction | None
    case: str  # "quadrant" or "mirror"
    gadget: Gadget | None = None
    wires: Wires | None = None

    @property
    def v2_anchor(self) -> Vec:
        return vadd(self.v1_anchor, self.v)

    @property
    def h2_anchor(self) -> Vec:
        return self.h


def _side_perp(h: Vec, v_e: Vec) -> Vec:
    """Perpendicular of h pointing into the half-plane containing v_e."""
    c = cross(h, v_e)
    if c == 0:
        raise PlanFailure(
            "orthogonal extremum is collinear with the longest vector; "
            "the shape behaves as flat"
        )
    return (-h[1], h[0]) if c > 0 else (h[1], -h[0])


def _quadrant_vector(shape: Shape, h: Vec, s2y: Vec) -> Vec | None:
    """A vector of the shape with a certified ball strictly inside the
    forward quadrant (positive projection on h and on s2y), or None."""
    hn2 = norm2(h)
    for beta in _BETAS:
        for alpha in _ALPHAS:
            c = vadd(vscale(alpha, h), vscale(beta, s2y))
            for rho in _RHOS:
                if not ball_in_shape(shape, c, rho):
                    continue
                d = dot(h, c)
                if d <= 0 or d * d <= rho * rho * hn2:
                    continue
                s = cross(h, c) if cross(h, s2y) > 0 else -cross(h, c)
                if s <= 0 or s * s <= rho * rho * hn2:
                    continue
                return c
    return None


def plan_crossing_vectors(shape: Shape) -> CrossingPlan:
    """Pick the continuous movement vectors and the junction anchors.

    Quadrant case: some non-flat piece of the shape sits strictly in the
    forward quadrant; its vector v crosses the main segment when the
    north anchor is dropped half its height below the axis and nudged
    east by a small offset. Mirror case: use the orthogonal extremum
    itself, anchored at the midpoint minus half that extremum.
    """
    if not is_non_flat(shape):
        raise FlatShape("crossing synthesis needs a non-flat shape")
    h = longest_vector(shape)
    v_e = max_orthogonal_vector(shape, h)
    s2y = _side_perp(h, v_e)

    v = _quadrant_vector(shape, h, s2y)
    if v is not None:
        a = dot(v, h) / norm2(h)
        v_yvec = vsub(v, vscale(a, h))
        ylen_lo = sqrt_bounds(norm2(v_yvec), 12)[0]
        eps = ylen_lo / 8
        for _ in range(41):
            v1 = vadd(vscale(Fraction(-1, 2), v_yvec), vscale(eps, h))
            v2 = vadd(v1, v)
            if not shape.contains(vsub(h, v1)) and open_segments_cross(
                v1, v2, ORIGIN, h
            ):
                return CrossingPlan(h, v_e, s2y, v, v1, eps, "quadrant")
            eps = eps / 2

    v = v_e
    v1 = vsub(vscale(Fraction(1, 2), h), vscale(Fraction(1, 2), v_e))
    v2 = vadd(v1, v)
    if not shape.contains(vsub(h, v1)) and open_segments_cross(
        v1, v2, ORIGIN, h
    ):
        return CrossingPlan(h, v_e, s2y, v, v1, None, "mirror")
    raise PlanFailure(
        "neither movement-vector case validated for this shape; "
        "this should not happen for non-flat inputs"
    )


def _pool_radius(plan: CrossingPlan) -> Fraction:
    if plan.epsilon is not None:
        return plan.epsilon / 2
    return sqrt_bounds(norm2(plan.v_e), 12)[0] / 16


def gadget_ratio_floor(plan: CrossingPlan) -> Fraction:
    """Certified ratio above which both junction cell pools are big
    enough (2 cells at the west anchor, 4 at the north anchor)."""
    key = (plan.v1_anchor, plan.epsilon, plan.case, plan.v_e)
    hit = _FLOOR_CACHE.get(key)
    if hit is not None:
        return hit
    rho = _pool_radius(plan)
    r_h = find_ratio_for_count(Shape([Disk(ORIGIN, rho)]), 2)
    r_v = find_ratio_for_count(Shape([Disk(plan.v1_anchor, rho)]), 4)
    out = max(r_h, r_v)
    _FLOOR_CACHE[key] = out
    return out


_FLOOR_CACHE: dict[tuple, Fraction] = {}


def _cells_within(anchor: Vec, radius: Fraction) -> list[Cell]:
    """Lattice cells within `radius` of `anchor`, nearest first, ties
    broken lexicographically."""
    r2 = radius * radius
    xs = range(floor(anchor[0] - radius), ceil(anchor[0] + radius) + 1)
    ys = range(floor(anchor[1] - radius), ceil(anchor[1] + radius) + 1)
    found = [
        (x, y) for x in xs for y in ys
        if dist2((frac(x), frac(y)), anchor) <= r2
    ]
    found.sort(key=lambda c: (dist2((frac(c[0]), frac(c[1])), anchor), c))
    return found


def _cells_near(anchor: Vec, count: int, start_radius: Fraction) -> list[Cell]:
    """At least `count` lattice cells nearest to `anchor`."""
    radius = max(start_radius, Fraction(2))
    for _ in range(12):
        cells = _cells_within(anchor, radius)
        if len(cells) >= count:
            return cells
        radius *= 2
    raise GeometryConflict(f"could not collect {count} cells near {anchor}")


def _scaled(anchor: Vec, r: Fraction) -> Vec:
    return vscale(r, anchor)


def materialize_gadget(plan: CrossingPlan, shape: Shape, r) -> CrossingPlan:
    """Choose lattice cells for the junction and re-check every
    neighboring relation discretely."""
    r = frac(r)
    nb = discretize(shape, r)
    p = nb.p
    if p < 7:
        raise RatioTooSmall(
            f"neighborhood has only {p} vectors at ratio {r}; junction "
            "grain levels need at least 7"
        )
    floor_r = gadget_ratio_floor(plan)
    if r < floor_r:
        raise RatioTooSmall(
            f"ratio {r} is below the junction pool floor {floor_r}"
        )
    rho = _pool_radius(plan) * r
    a_h1 = ORIGIN
    a_h2 = _scaled(plan.h2_anchor, r)
    a_v1 = _scaled(plan.v1_anchor, r)
    a_v2 = _scaled(plan.v2_anchor, r)

    # candidate pools may exceed the certified radius; the relation
    # checks below are exact, extra candidates only help
    west_pool = _cells_within(a_h1, max(rho, Fraction(5, 2)))
    if (0, 0) not in west_pool:
        west_pool.insert(0, (0, 0))
    north_pool = _cells_within(a_v1, max(rho, Fraction(7, 2)))
    if len(north_pool) < 4:
        raise RatioTooSmall(
            f"north junction pool has {len(north_pool)} cells at ratio "
            f"{r}, need 4"
        )

    for h2 in _cells_near(a_h2, 40, Fraction(3))[:40]:
        trigger = [c for c in west_pool if vsub(h2, c) in nb]
        if len(trigger) < 2:
            continue
        H1 = tuple(trigger[:2])
        for v2 in _cells_near(a_v2, 40, Fraction(3))[:40]:
            if v2 == h2 or v2 in H1:
                continue
            quad = [
                c for c in north_pool
                if vsub(v2, c) in nb
                and vsub(h2, c) not in nb
                and vsub(c, h2) not in nb
                and c not in H1 and c != h2 and c != v2
            ]
            if len(quad) < 4:
                continue
            V1 = tuple(quad[:4])
            gadget = Gadget(H1, V1, h2, v2)
            _assert_gadget_relations(gadget, nb)
            return replace(plan, gadget=gadget)
    raise RatioTooSmall(
        f"no junction cell assignment satisfies the neighboring "
        f"relations at ratio {r}"
    )


def _assert_gadget_relations(g: Gadget, nb: Neighborhood) -> None:
    for c in g.V1:
        if vsub(g.h2, c) in nb:
            raise GeometryConflict(f"north trigger cell {c} feeds {g.h2}")
    for c in g.H1:
        if vsub(g.h2, c) not in nb:
            raise GeometryConflict(f"west trigger cell {c} misses {g.h2}")
    for c in g.V1:
        if vsub(g.v2, c) not in nb:
            raise GeometryConflict(f"north trigger cell {c} misses {g.v2}")
    feeders = sum(1 for c in (g.v2,) if vsub(g.h2, c) in nb)
    if not len(g.H1) > feeders:
        raise GeometryConflict("west trigger is not strictly stronger")
    for c in g.H1:
        stray = sum(1 for q in g.V1 + (g.v2,) if vsub(c, q) in nb)
        if stray >= 6:
            raise GeometryConflict(f"west trigger cell {c} is overfed")


def _hits_from(cell: Cell, sources: Iterable[Cell], nb: Neighborhood) -> int:
    return sum(1 for s in sources if s != cell and vsub(cell, s) in nb)


def _image_avoids(cell: Cell, banned: Iterable[Cell], nb: Neighborhood) -> bool:
    return all(vsub(q, cell) not in nb for q in banned)


def _nb_step(nb: Neighborhood, target: Vec) -> Cell:
    """Neighborhood vector closest to the continuous target."""
    best = min(
        nb.sorted_vectors,
        key=lambda u: (dist2((frac(u[0]), frac(u[1])), target), u),
    )
    return best


def _axis_hop_east(nb: Neighborhood) -> int:
    k = max((u[0] for u in nb.vectors if u[1] == 0 and u[0] > 0), default=0)
    return k


def _axis_hop_south(nb: Neighborhood) -> int:
    k = max((u[1] for u in nb.vectors if u[0] == 0 and u[1] > 0), default=0)
    return k


def _pullback_anchor(base: Vec, direction: Vec, r: Fraction) -> Vec:
    """Anchor one movement step back from `base`, pulled in by ~4 cells
    so that rounding keeps the step inside the neighborhood."""
    dlen_lo = sqrt_bounds(norm2(direction), 12)[0]
    t = r - 4 / dlen_lo
    if t <= 0:
        raise RatioTooSmall(
            f"ratio {r} leaves no room for a feeder step along {direction}"
        )
    return vsub(base, vscale(t, direction))


def build_wires(plan: CrossingPlan, shape: Shape, r) -> CrossingPlan:
    """Grow feeder fans, border wires, and escape wires around the
    junction, then fix the enclosing square."""
    if plan.gadget is None:
        raise PlanFailure("gadget must be materialized before wiring")
    r = frac(r)
    nb = discretize(shape, r)
    p = nb.p
    g = plan.gadget
    if plan.h[0] <= 0:
        raise GeometryConflict(
            f"longest vector {plan.h} makes no eastward progress; the "
            "west-to-east wire cannot be built"
        )
    if plan.v_e[1] <= 0:
        raise GeometryConflict(
            f"orthogonal extremum {plan.v_e} makes no southward "
            "progress; the north-to-south wire cannot be built"
        )

    protected = set(g.V1) | {g.v2, g.h2}
    a_h2 = _scaled(plan.h2_anchor, r)
    a_v1 = _scaled(plan.v1_anchor, r)
    a_v2 = _scaled(plan.v2_anchor, r)

    # west fan: six cells, each feeding both west trigger cells and
    # keeping its whole forward image off the junction's north half
    fan_anchor = vscale(-(1 - FAN_PULLIN) * r, plan.h)
    fan: list[Cell] = []
    for c in _cells_near(fan_anchor, 80, r * FAN_PULLIN):
        if c in protected or c in g.H1:
            continue
        if not all(vsub(t, c) in nb for t in g.H1):
            continue
        if not _image_avoids(c, protected, nb):
            continue
        fan.append(c)
        if len(fan) == 6:
            break
    if len(fan) < 6:
        raise RatioTooSmall(
            f"west fan found only {len(fan)} of 6 valid cells at ratio {r}"
        )
    fan = sorted(fan)

    # single feeder behind the fan
    feeder_anchor = _pullback_anchor(fan_anchor, plan.h, r)
    fan_feeder = None
    for c in _cells_near(feeder_anchor, 60, Fraction(4)):
        if all(vsub(t, c) in nb for t in fan) and _image_avoids(
            c, protected | set(g.H1), nb
        ):
            fan_feeder = c
            break
    if fan_feeder is None:
        raise RatioTooSmall(f"no west fan feeder position works at ratio {r}")

    west_machine: list[Cell] = sorted(fan) + [fan_feeder] + list(g.H1) + [g.h2]

    # north stages: quads marching north from the north trigger until
    # outside both junction disks, then a single feeder behind them.
    # anchors are pulled in so the worst pool-to-pool pair still lands
    # inside the neighborhood (hop + both spreads <= reach)
    hlen2 = norm2(plan.h) * r * r
    stages: list[tuple[Cell, ...]] = []
    stage_alpha = list(g.V1)
    j = 0
    rho = max(_pool_radius(plan) * r, Fraction(2))
    vlen_lo = sqrt_bounds(norm2(plan.v_e), 12)[0]
    stage_pull = rho + Fraction(7, 2) + 2
    t_scale = r - stage_pull / vlen_lo
    if t_scale <= 0:
        raise RatioTooSmall(
            f"ratio {r} leaves no room for north stage hops"
        )
    while True:
        b = vsub(a_v1, vscale((j + 1) * t_scale, plan.v_e))
        outside = (
            dist2(b, ORIGIN) > hlen2 and dist2(b, a_h2) > hlen2
        )
        banned = (
            (protected | set(g.H1) | set(fan) | {fan_feeder}
             | {c for s in stages for c in s}) - set(stage_alpha)
        )
        quad: list[Cell] = []
        for c in _cells_within(b, rho):
            if c in protected or c in g.H1 or any(c in s for s in stages):
                continue
            if not all(vsub(t, c) in nb for t in stage_alpha):
                continue
            if not _image_avoids(c, banned, nb):
                continue
            w_hits = _hits_from(c, west_machine, nb)
            if outside and w_hits > 0:
                continue
            if not outside and w_hits > 3:
                continue
            quad.append(c)
            if len(quad) == 4:
                break
        if len(quad) < 4:
            raise RatioTooSmall(
                f"north stage {j} found only {len(quad)} of 4 cells at "
                f"ratio {r}"
            )
        stages.append(tuple(sorted(quad)))
        if outside:
            break
        stage_alpha = quad
        j += 1
        if j > 64:
            raise GeometryConflict(
                "north staging cannot leave the junction disks"
            )
    final_stage = stages[-1]
    inner_stages = stages[:-1]

    b_final = vsub(a_v1, vscale(len(stages) * t_scale, plan.v_e))
    nf_anchor = _pullback_anchor(b_final, plan.v_e, r)
    north_feeder = None
    for c in _cells_near(nf_anchor, 60, Fraction(4)):
        if all(vsub(t, c) in nb for t in final_stage) and _image_avoids(
            c, protected | set(g.H1) | set(fan) | {fan_feeder}, nb
        ) and _hits_from(c, west_machine, nb) == 0:
            north_feeder = c
            break
    if north_feeder is None:
        raise RatioTooSmall(f"no north feeder position works at ratio {r}")

    step_e = _nb_step(nb, vscale(r, plan.h))
    step_s = _nb_step(nb, vscale(r, plan.v_e))
    if step_e[0] <= 0 or step_s[1] <= 0:
        raise GeometryConflict(
            f"movement steps {step_e}/{step_s} make no border progress"
        )

    def chain(start: Cell, step: Cell, stop_coord: int, axis: int) -> list[Cell]:
        # walk backward along -step until strictly past stop_coord, so
        # the last cell (the seed) sticks out beyond the machine body
        out = [start]
        cur = start
        guard = 0
        while cur[axis] >= stop_coord:
            cur = (cur[0] - step[0], cur[1] - step[1])
            out.append(cur)
            guard += 1
            if guard > 10000:
                raise GeometryConflict("border wire does not terminate")
        return out

    # escape stubs
    east0 = (g.h2[0] + step_e[0], g.h2[1] + step_e[1])
    south0 = (g.v2[0] + step_s[0], g.v2[1] + step_s[1])

    fixed = (
        set(fan) | {fan_feeder} | set(g.cells())
        | {c for s in stages for c in s} | {north_feeder, east0, south0}
    )
    min_x = min(c[0] for c in fixed)
    min_y = min(c[1] for c in fixed)

    west_chain = chain(fan_feeder, step_e, min_x, 0)[1:]
    min_y = min(min_y, min(c[1] for c in west_chain))
    north_chain = chain(north_feeder, step_s, min_y, 1)[1:]
    new_min_x = min(min_x, min(c[0] for c in north_chain))
    if new_min_x < (west_chain[-1][0] if west_chain else fan_feeder[0]):
        west_chain = chain(fan_feeder, step_e, new_min_x, 0)[1:]
    if not west_chain or not north_chain:
        raise GeometryConflict("border wires are empty; junction touches "
                               "the border")

    west_seed = west_chain[-1]
    north_seed = north_chain[-1]

    body = fixed | set(west_chain) | set(north_chain)
    x0 = min(c[0] for c in body)
    y0 = min(c[1] for c in body)
    if west_seed[0] != x0 or north_seed[1] != y0:
        raise GeometryConflict(
            "a machine cell lies outside the seed borders; the shape's "
            "drift defeats the border layout"
        )

    # grow both escapes past the body, then square the layout
    x_hi = max(c[0] for c in body)
    y_hi = max(c[1] for c in body)
    east_chain = [east0]
    while east_chain[-1][0] < x_hi:
        c = east_chain[-1]
        east_chain.append((c[0] + step_e[0], c[1] + step_e[1]))
    south_chain = [south0]
    while south_chain[-1][1] < y_hi:
        c = south_chain[-1]
        south_chain.append((c[0] + step_s[0], c[1] + step_s[1]))

    def extent() -> tuple[int, int]:
        xs = [c[0] for c in east_chain + south_chain] + [x_hi, x0]
        ys = [c[1] for c in east_chain + south_chain] + [y_hi, y0]
        return max(xs) - x0, max(ys) - y0

    hop_e = _axis_hop_east(nb)
    hop_s = _axis_hop_south(nb)
    for _ in range(10000):
        w, hgt = extent()
        exit_e = east_chain[-1]
        exit_s = south_chain[-1]
        gap_e = max(w, hgt) - (exit_e[0] - x0)
        gap_s = max(w, hgt) - (exit_s[1] - y0)
        if gap_e == 0 and gap_s == 0:
            break
        if gap_e > 0:
            if hop_e < 1:
                raise GeometryConflict(
                    "no eastward axis vector to square the layout"
                )
            east_chain.append((exit_e[0] + min(hop_e, gap_e), exit_e[1]))
        if gap_s > 0:
            if hop_s < 1:
                raise GeometryConflict(
                    "no southward axis vector to square the layout"
                )
            south_chain.append((exit_s[0], exit_s[1] + min(hop_s, gap_s)))
    else:
        raise GeometryConflict("could not square the layout")

    east_exit = east_chain[-1]
    south_exit = south_chain[-1]
    n = extent()[0] + 1

    stage_list = [
        WireStage("west_wire", tuple(reversed(west_chain)), p - 1),
        WireStage("west_fan_feeder", (fan_feeder,), p - 1),
        WireStage("west_fan", tuple(fan), p - 1),
        WireStage("east_wire", tuple(east_chain), p - 1),
        WireStage("north_wire", tuple(reversed(north_chain)), p - 1),
        WireStage("north_fan_feeder", (north_feeder,), p - 1),
        WireStage("north_fan", final_stage, p - 1),
        WireStage("south_wire", tuple(south_chain), p - 1),
    ]
    for idx, st in enumerate(reversed(inner_stages)):
        stage_list.append(WireStage(f"north_stage_{idx}", st, p - 4))

    _check_wire_interactions(stage_list, g, nb, p)

    wires = Wires(
        stages=tuple(stage_list),
        n=n,
        shift=(-x0, -y0),
        north=north_seed[0] - x0,
        east=east_exit[1] - y0,
        south=south_exit[0] - x0,
        west=west_seed[1] - y0,
    )
    return replace(plan, wires=wires)


def _check_wire_interactions(
    stages: Sequence[WireStage], g: Gadget, nb: Neighborhood, p: int
) -> None:
    """Static non-interference sweep before the dynamic verification."""
    west_names = {"west_wire", "west_fan_feeder", "west_fan", "east_wire"}
    west_cells = [c for s in stages if s.name in west_names for c in s.cells]
    west_cells += list(g.H1) + [g.h2]
    north_cells = [c for s in stages if s.name not in west_names
                   for c in s.cells]
    north_cells += list(g.V1) + [g.v2]

    seen: dict[Cell, str] = {}
    for st in stages:
        for c in st.cells:
            if c in seen:
                raise GeometryConflict(
                    f"cell {c} assigned to both {seen[c]} and {st.name}"
                )
            seen[c] = st.name
    for c in g.cells():
        if c in seen:
            raise GeometryConflict(f"junction cell {c} collides with "
                                   f"{seen[c]}")

    for st in stages:
        if st.grains == p - 1:
            other = north_cells if st.name in west_names else west_cells
            for c in st.cells:
                k = _hits_from(c, other, nb)
                if k:
                    raise GeometryConflict(
                        f"{st.name} cell {c} takes {k} cross hits"
                    )
    for c in g.V1 + (g.v2,):
        k = _hits_from(c, west_cells, nb)
        if k > 3:
            raise GeometryConflict(f"junction cell {c} takes {k} west hits")
    for c in g.H1:
        k = _hits_from(c, north_cells, nb)
        if k > 5:
            raise GeometryConflict(f"junction cell {c} takes {k} north hits")
    if _hits_from(g.h2, north_cells, nb) > 1:
        raise GeometryConflict("east output cell is overfed from the north")

    grains: dict[Cell, int] = dict(g.grain_levels(p))
    for st in stages:
        for c in st.cells:
            grains[c] = st.grains
    for levels in (_west_levels(stages, g), _north_levels(stages, g)):
        earlier: list[Cell] = []
        prev: tuple[Cell, ...] = ()
        for level in levels:
            for c in level:
                k = _hits_from(c, earlier, nb)
                if grains[c] + k >= p:
                    raise GeometryConflict(
                        f"cell {c} collects {k} hits from rounds before "
                        "its feed round; the wave would desynchronize"
                    )
            earlier.extend(prev)
            prev = level


def _stage_map(stages: Sequence[WireStage]) -> dict[str, WireStage]:
    return {s.name: s for s in stages}


def _west_levels(
    stages: Sequence[WireStage], g: Gadget
) -> list[tuple[Cell, ...]]:
    """West machine cells grouped by firing round, in firing order."""
    m = _stage_map(stages)
    levels = [(c,) for c in m["west_wire"].cells]
    levels.append(m["west_fan_feeder"].cells)
    levels.append(m["west_fan"].cells)
    levels.append(g.H1)
    levels.append((g.h2,))
    levels.extend((c,) for c in m["east_wire"].cells)
    return levels


def _north_levels(
    stages: Sequence[WireStage], g: Gadget
) -> list[tuple[Cell, ...]]:
    """North machine cells grouped by firing round, in firing order."""
    m = _stage_map(stages)
    levels = [(c,) for c in m["north_wire"].cells]
    levels.append(m["north_fan_feeder"].cells)
    levels.append(m["north_fan"].cells)
    idx = 0
    while f"north_stage_{idx}" in m:
        levels.append(m[f"north_stage_{idx}"].cells)
        idx += 1
    levels.append(g.V1)
    levels.append((g.v2,))
    levels.extend((c,) for c in m["south_wire"].cells)
    return levels


def assemble(plan: CrossingPlan, shape: Shape, r) -> tuple[Configuration, CrossingSpec]:
    """Lay the verified plan into a square configuration."""
    if plan.gadget is None or plan.wires is None:
        raise PlanFailure("assemble needs a fully materialized plan")
    r = frac(r)
    nb = discretize(shape, r)
    p = nb.p
    w = plan.wires
    grains = plan.gadget.grain_levels(p)
    for c, lvl in w.cell_grains().items():
        if c in grains:
            raise GeometryConflict(f"cell {c} has two grain assignments")
        grains[c] = lvl
    dx, dy = w.shift
    config = Configuration(grains).translate(dx, dy)
    spec = CrossingSpec(n=w.n, north=w.north, east=w.east, south=w.south,
                        west=w.west)
    return config, spec


def synthesize(shape: Shape, r) -> tuple[Configuration, CrossingSpec]:
    """Build and verify a crossing for the shape scaled by r.

    The dynamic verification is a hard gate: a configuration that fails
    it is never returned, and a failure after all local checks passed
    raises SynthesisBug."""
    plan = plan_crossing_vectors(shape)
    plan = materialize_gadget(plan, shape, r)
    plan = build_wires(plan, shape, r)
    config, spec = assemble(plan, shape, r)
    nb = discretize(shape, frac(r))
    report = verify_crossing(config, nb, spec)
    if not report.verdict:
        raise SynthesisBug(
            "assembled configuration failed dynamic verification",
            report=report.to_dict(),
        )
    if nb.is_convex():
        fired_soft = any(
            config[c] <= nb.p - 2
            for c in (plan.gadget.h2,)
        )
        if not fired_soft:
            raise SynthesisBug("convex-shape certificate cell is missing")
    return config, spec


def synthesize_with_plan(shape: Shape, r) -> tuple[Configuration, CrossingSpec, CrossingPlan]:
    plan = plan_crossing_vectors(shape)
    plan = materialize_gadget(plan, shape, r)
    plan = build_wires(plan, shape, r)
    config, spec = assemble(plan, shape, r)
    nb = discretize(shape, frac(r))
    report = verify_crossing(config, nb, spec)
    if not report.verdict:
        raise SynthesisBug(
            "assembled configuration failed dynamic verification",
            report=report.to_dict(),
        )
    return config, spec, plan


def plan_report(plan: CrossingPlan, shape: Shape) -> dict:
    """JSON-ready report: exact rational anchors, case, stage ratios."""
    rho = _pool_radius(plan)
    fan_disk = Shape([Disk(vscale(-(1 - FAN_PULLIN), plan.h), FAN_PULLIN)])
    stage_disk = Shape([Disk(vsub(plan.v1_anchor, plan.v_e), rho)])
    r1 = gadget_ratio_floor(plan)
    r2 = find_ratio_for_count(fan_disk, 6)
    r3 = find_ratio_for_count(stage_disk, 4)
    r4 = Fraction(4)
    out = {
        "case": plan.case,
        "epsilon": format_frac(plan.epsilon) if plan.epsilon is not None else None,
        "anchors": {
            "h": [format_frac(x) for x in plan.h],
            "v_e": [format_frac(x) for x in plan.v_e],
            "s2_y": [format_frac(x) for x in plan.s2_y],
            "v": [format_frac(x) for x in plan.v],
            "v1": [format_frac(x) for x in plan.v1_anchor],
            "v2": [format_frac(x) for x in plan.v2_anchor],
            "h2": [format_frac(x) for x in plan.h2_anchor],
        },
        "stage_ratios": {
            "r1": format_frac(r1),
            "r2": format_frac(r2),
            "r3": format_frac(r3),
            "r4": format_frac(r4),
        },
        "ratio_floor": format_frac(max(r1, r2, r3, r4)),
    }
    if plan.gadget is not None:
        out["gadget"] = {
            "H1": sorted(plan.gadget.H1),
            "V1": sorted(plan.gadget.V1),
            "h2": list(plan.gadget.h2),
            "v2": list(plan.gadget.v2),
        }
    if plan.wires is not None:
        out["square"] = {
            "n": plan.wires.n,
            "north": plan.wires.north,
            "east": plan.wires.east,
            "south": plan.wires.south,
            "west": plan.wires.west,
        }
        out["wire_stages"] = [
            {"name": s.name, "cells": len(s.cells), "grains": s.grains}
            for s in plan.wires.stages
        ]
    return out


def find_min_working_ratio(shape: Shape, r_max, step) -> Fraction:
    """Smallest ratio on the sampled grid where synthesize succeeds,
    spot-checked at twice the ratio and three random larger samples."""
    r_max = frac(r_max)
    step = frac(step)
    if step <= 0:
        raise ValueError("step must be positive")
    if not is_non_flat(shape):
        raise FlatShape("ratio search needs a non-flat shape")
    samples = []
    k = 1
    while step * k <= r_max:
        samples.append(step * k)
        k += 1
    if not samples:
        raise NoRatioFound(f"no sample points at or below {r_max}")

    def works(r: Fraction) -> bool:
        try:
            synthesize(shape, r)
            return True
        except (RatioTooSmall, GeometryConflict, PlanFailure,
                EmptyNeighborhood):
            return False

    for idx, r in enumerate(samples):
        if not works(r):
            continue
        checks = [min(r_max, 2 * r)]
        rng = random.Random(f"ratio-sweep|{r}|{r_max}|{step}")
        larger = samples[idx + 1:]
        if larger:
            checks.extend(rng.choice(larger) for _ in range(3))
        if all(c == r or works(frac(c)) for c in checks):
            return r
    raise NoRatioFound(
        f"no ratio at or below {r_max} produced a verified crossing"
    )
