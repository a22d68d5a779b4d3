"""Firing graphs of seeded runs and crossing disjointification.

The firing graph of a run records which cells fired, when they first
fired, and the causal arcs: (u, v) is an arc when v lies in u's
outgoing neighborhood, both fired, and u fired strictly earlier. On a
uniform neighborhood every cell has equal in- and out-degree p, so the
underlying infinite graph is Eulerian by construction; no runtime check
is needed.

Disjointification removes the shared vertices of the two runs of a
crossing: shared vertices are emptied, and every surviving vertex that
was fed from a shared vertex in exactly one of the two graphs gets that
many replacement grains up front. The result must verify as a crossing
again, with each run's vertex set shrunk exactly by the intersection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Tuple

from .crossing import CrossingSpec, verify_crossing
from .dynamics import parallel_step
from .errors import BudgetExhausted, NotACrossing, SynthesisBug
from .grid import Cell, Configuration, Neighborhood

Arc = Tuple[Cell, Cell]


@dataclass(frozen=True)
class FiringGraph:
    vertices: FrozenSet[Cell]
    fire_time: Mapping[Cell, int]
    arcs: FrozenSet[Arc]

    def out_neighbors(self, v: Cell) -> FrozenSet[Cell]:
        return frozenset(b for a, b in self.arcs if a == v)

    def in_neighbors(self, v: Cell) -> FrozenSet[Cell]:
        return frozenset(a for a, b in self.arcs if b == v)

    def sorted_fired(self) -> list[tuple[int, int, int]]:
        return sorted((x, y, self.fire_time[(x, y)]) for x, y in self.vertices)

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs)


def extract_firing_graph(
    config: Configuration,
    seed: Configuration,
    nb: Neighborhood,
    max_rounds: int = 10**6,
) -> FiringGraph:
    """Simulate config + seed to stability and collect the firing graph.

    fire_time is the parallel round at which a cell FIRST fired; cells
    may fire more than once in general runs and the arcs still use the
    first-firing clock.
    """
    cur = config.add(seed)
    fire_time: Dict[Cell, int] = {}
    t = 0
    while True:
        cur, fired = parallel_step(cur, nb)
        if not fired:
            break
        for c in fired:
            fire_time.setdefault(c, t)
        t += 1
        if t > max_rounds:
            raise BudgetExhausted(f"firing graph run exceeded {max_rounds} rounds", steps=t)
    vertices = frozenset(fire_time)
    arcs = set()
    for (x, y) in vertices:
        tu = fire_time[(x, y)]
        for dx, dy in nb.sorted_vectors:
            w = (x + dx, y + dy)
            if w in fire_time and tu < fire_time[w]:
                arcs.add(((x, y), w))
    return FiringGraph(vertices, dict(fire_time), frozenset(arcs))


def disjointify(
    config: Configuration,
    nb: Neighborhood,
    spec: CrossingSpec,
) -> Configuration:
    """Rebuild the crossing so its two runs share no fired vertices.

    Raises NotACrossing when the input fails verification and
    SynthesisBug when the rebuilt configuration does not verify or its
    runs' vertex sets are not exactly the originals minus the overlap.
    """
    report = verify_crossing(config, nb, spec)
    if not report.verdict:
        raise NotACrossing("input configuration is not a crossing", report=report)

    g1 = extract_firing_graph(config, spec.west_seed(), nb)
    g2 = extract_firing_graph(config, spec.north_seed(), nb)
    shared = g1.vertices & g2.vertices

    fed1 = set()
    fed2 = set()
    for u in shared:
        fed1 |= g1.out_neighbors(u)
        fed2 |= g2.out_neighbors(u)
    grains = dict(config.items())
    for v in fed1 - fed2 - shared:
        grains[v] = grains.get(v, 0) + len(g1.in_neighbors(v) & shared)
    for v in fed2 - fed1 - shared:
        grains[v] = grains.get(v, 0) + len(g2.in_neighbors(v) & shared)
    for v in shared:
        grains[v] = 0
    rebuilt = Configuration(grains)

    new_report = verify_crossing(rebuilt, nb, spec)
    if not new_report.verdict:
        raise SynthesisBug(
            "disjointified configuration failed crossing verification",
            report=new_report,
        )
    h1 = extract_firing_graph(rebuilt, spec.west_seed(), nb)
    h2 = extract_firing_graph(rebuilt, spec.north_seed(), nb)
    if h1.vertices != g1.vertices - shared or h2.vertices != g2.vertices - shared:
        raise SynthesisBug("disjointified runs fire an unexpected vertex set")
    if h1.vertices & h2.vertices:
        raise SynthesisBug("disjointified runs still share vertices")
    return rebuilt
