"""Crossings that share a fired cell, for exercising disjointification.

The synthesized layouts keep the two transport machines vertex
disjoint. This module grafts a small shared gate onto one, placed in
the otherwise empty quadrant between the west and north wires:

  * sa and z hang off the west wire (p - 1 grains, west run only),
    na and nb off the north wire (north run only);
  * wf collects two west spur hits (p - 2) and nf two north spur hits
    (p - 2), each keeping one grain of slack;
  * b0 (p - 1) is fed by wf in the west run and by nf in the north
    run, so it fires in both and the two firing graphs intersect in
    exactly {b0}; its own hits land only on wf, nf and u, and the
    first two absorb the cross-run hit with their slack;
  * u (p - 2) is fed by z and b0 in the west run, so the west graph
    gains the arc b0 -> u; in the north run u sees only b0's hit and
    stays quiet.

Disjointifying such a crossing zeroes b0 and compensates u by one
grain for the in-arc it loses with the shared set.

The gate cannot sit near the junction: the junction's slack is fully
spent there (the west trigger pair absorbs four north hits and the
east output one, exactly what the north quad and the north output
deliver), and the reach balls of the west machine cells overlap into
a solid band across the square, so a new north-firing cell south of
the north wire would collect at least as many west hits as north
hits. Hanging the gate off the wires far from the junction avoids
every saturated budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .crossing import CrossingSpec, verify_crossing
from .errors import GeometryConflict, SynthesisBug
from .exact import frac
from .firing import extract_firing_graph
from .grid import Cell, Configuration, Neighborhood
from .shapes import Shape, discretize
from .synthesis import (
    CrossingPlan,
    _cells_within,
    _hits_from,
    synthesize_with_plan,
)

# Placements solved by hand at ratio 19, rescaled by r/19 as search
# anchors. Every constraint is re-checked exactly, the template only
# seeds the candidate pools. West roles and u are offsets from the
# last west wire cell, north roles from the last north wire cell.
_TEMPLATE_R = Fraction(19)
_W_OFFSETS = {
    "sa": (3, -8),
    "wf": (13, -10),
    "b0": (23, -26),
    "z": (1, -24),
    "u": (12, -33),
}
_N_OFFSETS = {
    "na": (-8, 13),
    "nb": (-12, 18),
    "nf": (-14, 24),
}


@dataclass(frozen=True)
class EntangledCrossing:
    config: Configuration
    spec: CrossingSpec
    shared_cell: Cell  # square coordinates
    tail_cell: Cell  # square coordinates; disjointify compensates it
    gate_cells: dict[str, Cell]  # role -> square coordinates


def _gate_grains(p: int) -> dict[str, int]:
    return {
        "sa": p - 1,
        "wf": p - 2,
        "z": p - 1,
        "b0": p - 1,
        "u": p - 2,
        "na": p - 1,
        "nb": p - 1,
        "nf": p - 2,
    }


def _stage_cells(plan: CrossingPlan, *names: str) -> list[Cell]:
    return [c for s in plan.wires.stages if s.name in names for c in s.cells]


def entangle_crossing(shape: Shape, r) -> EntangledCrossing:
    """Synthesize at ratio r and graft the shared gate.

    Raises GeometryConflict when no gate placement fits at this ratio.
    """
    r = frac(r)
    config, spec, plan = synthesize_with_plan(shape, r)
    nb = discretize(shape, r)
    p = nb.p

    gate = _place_gate(plan, nb, spec, r)
    if gate is None:
        raise GeometryConflict(f"no shared-gate placement works at ratio {r}")

    grains = dict(plan.gadget.grain_levels(p))
    grains.update(plan.wires.cell_grains())
    for role, lvl in _gate_grains(p).items():
        grains[gate[role]] = lvl
    dx, dy = plan.wires.shift
    entangled = Configuration(grains).translate(dx, dy)

    report = verify_crossing(entangled, nb, spec)
    if not report.verdict:
        raise SynthesisBug(
            "entangled configuration failed crossing verification",
            report=report.to_dict(),
        )
    g1 = extract_firing_graph(entangled, spec.west_seed(), nb)
    g2 = extract_firing_graph(entangled, spec.north_seed(), nb)
    shared = g1.vertices & g2.vertices
    gate_sq = {role: (c[0] + dx, c[1] + dy) for role, c in gate.items()}
    if shared != {gate_sq["b0"]}:
        raise SynthesisBug(
            f"entangled runs share {sorted(shared)}, expected exactly "
            f"{gate_sq['b0']}"
        )
    if gate_sq["u"] not in g1.out_neighbors(gate_sq["b0"]):
        raise SynthesisBug("shared cell lost its west-run arc onto the tail")
    return EntangledCrossing(
        entangled, spec, gate_sq["b0"], gate_sq["u"], gate_sq
    )


def _place_gate(
    plan: CrossingPlan, nb: Neighborhood, spec: CrossingSpec, r: Fraction
) -> dict[str, Cell] | None:
    """Greedy role-by-role placement with exact reach and budget checks."""
    g = plan.gadget
    dx, dy = plan.wires.shift
    n = plan.wires.n
    scale = r / _TEMPLATE_R
    rad = max(Fraction(4), r / 4)

    west_wire = _stage_cells(plan, "west_wire")
    north_wire = _stage_cells(plan, "north_wire")
    w1 = west_wire[-1]
    n1 = north_wire[-1]
    seed_w = (0 - dx, spec.west - dy)
    seed_n = (spec.north - dx, 0 - dy)

    west_fire = (
        [seed_w]
        + west_wire
        + _stage_cells(plan, "west_fan_feeder", "west_fan", "east_wire")
        + list(g.H1)
        + [g.h2]
    )
    north_fire = (
        [seed_n]
        + north_wire
        + _stage_cells(plan, "north_fan_feeder", "north_fan", "south_wire")
        + [
            c
            for s in plan.wires.stages
            if s.name.startswith("north_stage_")
            for c in s.cells
        ]
        + list(g.V1)
        + [g.v2]
    )
    machine = set(west_fire) | set(north_fire)

    # machine cells a west-run gate cell may touch: everything fired
    # by the time its own wave arrives (the trigger pair's extra west
    # hit is a same-round no-op); likewise for the north side
    w_image_ok = set(
        [seed_w]
        + west_wire
        + _stage_cells(plan, "west_fan_feeder", "west_fan")
        + list(g.H1)
    )
    n_image_ok = set(
        [seed_n]
        + north_wire
        + _stage_cells(plan, "north_fan_feeder", "north_fan")
    )

    def reach(a: Cell, b: Cell) -> bool:
        return (b[0] - a[0], b[1] - a[1]) in nb

    def apart(a: Cell, b: Cell) -> bool:
        return not reach(a, b) and not reach(b, a)

    def image_ok(c: Cell, allowed: set[Cell]) -> bool:
        return all(m in allowed for m in machine if reach(c, m))

    def wx(c: Cell) -> int:
        return _hits_from(c, west_fire, nb)

    def nx(c: Cell) -> int:
        return _hits_from(c, north_fire, nb)

    def pool(base: Cell, off: Cell) -> list[Cell]:
        anchor = (frac(base[0]) + off[0] * scale,
                  frac(base[1]) + off[1] * scale)
        return [
            c
            for c in _cells_within(anchor, rad)
            if c not in machine
            and 1 <= c[0] + dx <= n - 2
            and 1 <= c[1] + dy <= n - 2
        ][:48]

    for b0 in pool(w1, _W_OFFSETS["b0"]):
        if wx(b0) or nx(b0) or not image_ok(b0, set()):
            continue
        for wf in pool(w1, _W_OFFSETS["wf"]):
            if wf == b0:
                continue
            if not (reach(w1, wf) and reach(wf, b0)):
                continue
            if nx(wf) or not image_ok(wf, w_image_ok | {b0}):
                continue
            sa = next(
                (
                    c
                    for c in pool(w1, _W_OFFSETS["sa"])
                    if c not in (wf, b0)
                    and reach(w1, c)
                    and reach(c, wf)
                    and apart(c, b0)
                    and not nx(c)
                    and image_ok(c, w_image_ok | {wf})
                ),
                None,
            )
            if sa is None:
                continue
            nf = next(
                (
                    c
                    for c in pool(n1, _N_OFFSETS["nf"])
                    if c not in (b0, wf, sa)
                    and reach(c, b0)
                    and apart(c, wf)
                    and apart(c, sa)
                    and not wx(c)
                    and image_ok(c, n_image_ok | {b0})
                ),
                None,
            )
            if nf is None:
                continue
            chain = _north_chain(
                nf, n1, (b0, wf, sa), pool, reach, apart, wx, image_ok,
                n_image_ok,
            )
            if chain is None:
                continue
            na, nb_cell = chain
            tail = _tail(
                b0, wf, sa, (na, nb_cell, nf), w1, pool, reach, apart,
                wx, nx, image_ok, w_image_ok,
            )
            if tail is None:
                continue
            z, u = tail
            return {
                "sa": sa, "wf": wf, "z": z, "b0": b0, "u": u,
                "na": na, "nb": nb_cell, "nf": nf,
            }
    return None


def _north_chain(nf, n1, west_gate, pool, reach, apart, wx, image_ok,
                 n_image_ok):
    """Two spur cells carrying the north wire's wave to nf."""
    for na in pool(n1, _N_OFFSETS["na"]):
        if na == nf or na in west_gate:
            continue
        if not (reach(n1, na) and reach(na, nf)):
            continue
        if not all(apart(na, w) for w in west_gate):
            continue
        if wx(na) or not image_ok(na, n_image_ok | {nf}):
            continue
        for nb_cell in pool(n1, _N_OFFSETS["nb"]):
            if nb_cell in (na, nf) or nb_cell in west_gate:
                continue
            if not (reach(na, nb_cell) and reach(nb_cell, nf)):
                continue
            if not all(apart(nb_cell, w) for w in west_gate):
                continue
            if wx(nb_cell) or not image_ok(nb_cell, n_image_ok | {nf, na}):
                continue
            return na, nb_cell
    return None


def _tail(b0, wf, sa, north_gate, w1, pool, reach, apart, wx, nx,
          image_ok, w_image_ok):
    """The private z feeder and the compensated tail cell u.

    u must see exactly two west-run hits (z then b0) and exactly one
    north-run hit (b0), so it fires only in the west run, strictly
    after b0.
    """
    for z in pool(w1, _W_OFFSETS["z"]):
        if z in (b0, wf, sa) or z in north_gate:
            continue
        if not reach(sa, z):
            continue
        if not apart(z, b0):
            continue
        if not all(apart(z, q) for q in north_gate):
            continue
        if nx(z) or not image_ok(z, w_image_ok | {wf, sa}):
            continue
        for u in pool(w1, _W_OFFSETS["u"]):
            if u in (z, b0, wf, sa) or u in north_gate:
                continue
            if not (reach(z, u) and reach(b0, u)):
                continue
            if reach(sa, u) or reach(wf, u):
                continue
            if not all(apart(u, q) for q in north_gate):
                continue
            if wx(u) or nx(u):
                continue
            if not image_ok(u, w_image_ok | {z, b0, wf, sa}):
                continue
            return z, u
    return None


def entangled_corpus(
    shape: Shape, count: int, r_start, step
) -> list[EntangledCrossing]:
    """First `count` grid ratios where synthesis and the gate both fit."""
    out: list[EntangledCrossing] = []
    r = frac(r_start)
    step = frac(step)
    attempts = 0
    while len(out) < count:
        try:
            out.append(entangle_crossing(shape, r))
        except GeometryConflict:
            pass
        r += step
        attempts += 1
        if attempts > 200:
            raise GeometryConflict(
                f"only {len(out)} of {count} entangled crossings found "
                f"after {attempts} ratios"
            )
    return out
