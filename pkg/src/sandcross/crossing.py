"""Crossing verification on an n x n square.

Grid convention: row y=0 is the north border, column x=0 the west
border. A border input is a single grain placed on a border cell. A
stable square configuration "crosses" when a west input eventually
leaves through the designated east cell without ever activating the
south border, and a north input leaves through the designated south
cell without ever activating the east border.

All checks simulate parallel rounds and additionally enforce the
single-firing invariant: starting from a stable configuration plus one
border grain, no cell may fire twice. That invariant is a theorem for
centrally symmetric neighborhoods; the simulation asserts it outright
and an AssertionError here means the precondition was broken.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Mapping

from .dynamics import is_stable, parallel_step
from .errors import BudgetExhausted
from .grid import Cell, Configuration, Neighborhood

DEFAULT_ROUNDS = 10**6


@dataclass(frozen=True)
class UnitVectorEn:
    """0/1 vector of length n with a single 1 at `index`."""

    n: int
    index: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("length n must be >= 1")
        if not 0 <= self.index < self.n:
            raise ValueError(f"index {self.index} out of range for n={self.n}")


def north_input(e: UnitVectorEn) -> Configuration:
    """Place the vector along the north border (row y=0), x = index."""
    return Configuration({(e.index, 0): 1})


def east_input(e: UnitVectorEn) -> Configuration:
    """Place the vector along the east border (column x=n-1), y = index."""
    return Configuration({(e.n - 1, e.index): 1})


def south_input(e: UnitVectorEn) -> Configuration:
    """Place the vector along the south border (row y=n-1), x = index."""
    return Configuration({(e.index, e.n - 1): 1})


def west_input(e: UnitVectorEn) -> Configuration:
    """Place the vector along the west border (column x=0), y = index."""
    return Configuration({(0, e.index): 1})


@dataclass(frozen=True)
class CrossingSpec:
    """Square side plus the four designated border indices."""

    n: int
    north: int
    east: int
    south: int
    west: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("square side must be >= 1")
        for name in ("north", "east", "south", "west"):
            v = getattr(self, name)
            if not 0 <= v < self.n:
                raise ValueError(f"{name} index {v} out of range for n={self.n}")

    def west_seed(self) -> Configuration:
        return west_input(UnitVectorEn(self.n, self.west))

    def north_seed(self) -> Configuration:
        return north_input(UnitVectorEn(self.n, self.north))

    def east_cell(self) -> Cell:
        return (self.n - 1, self.east)

    def south_cell(self) -> Cell:
        return (self.south, self.n - 1)

    def south_border(self) -> FrozenSet[Cell]:
        return frozenset((x, self.n - 1) for x in range(self.n))

    def east_border(self) -> FrozenSet[Cell]:
        return frozenset((self.n - 1, y) for y in range(self.n))


@dataclass
class RunRecord:
    """Outcome of one seeded run watched for transport and isolation."""

    transported: bool = False
    witness_time: int | None = None
    isolation_ok: bool = True
    first_violation: tuple[int, tuple[Cell, ...]] | None = None
    rounds: int = 0
    fired: FrozenSet[Cell] = frozenset()


def _watch_run(
    start: Configuration,
    nb: Neighborhood,
    target: Cell | None,
    forbidden: FrozenSet[Cell],
    max_rounds: int = DEFAULT_ROUNDS,
) -> RunRecord:
    """Simulate to stability, watching the active set at every time step."""
    rec = RunRecord()
    fired_once: set[Cell] = set()
    cur = start
    t = 0
    target_set = {target} if target is not None else None
    while True:
        act = frozenset(c for c, g in cur.items() if g >= nb.p)
        if target_set is not None and not rec.transported and act == target_set:
            rec.transported = True
            rec.witness_time = t
        bad = act & forbidden
        if bad and rec.isolation_ok:
            rec.isolation_ok = False
            rec.first_violation = (t, tuple(sorted(bad))[:20])
        if not act:
            break
        if t >= max_rounds:
            raise BudgetExhausted(f"run exceeded {max_rounds} rounds", steps=t)
        for c in act:
            if c in fired_once:
                raise AssertionError(
                    f"single-firing invariant violated at {c} (time {t}); "
                    "input was not a stable configuration plus one border grain "
                    "under a symmetric neighborhood"
                )
            fired_once.add(c)
        cur, _ = parallel_step(cur, nb)
        t += 1
    rec.rounds = t
    rec.fired = frozenset(fired_once)
    return rec


def verify_transporter(
    config: Configuration,
    nb: Neighborhood,
    seed: Configuration,
    target: Cell,
    max_rounds: int = DEFAULT_ROUNDS,
) -> RunRecord:
    """Does config + seed at some time have exactly {target} active?"""
    return _watch_run(config.add(seed), nb, target, frozenset(), max_rounds)


def verify_isolation(
    config: Configuration,
    nb: Neighborhood,
    seed: Configuration,
    forbidden: Iterable[Cell],
    max_rounds: int = DEFAULT_ROUNDS,
) -> RunRecord:
    """Is the active set disjoint from `forbidden` at every time step?"""
    return _watch_run(config.add(seed), nb, None, frozenset(forbidden), max_rounds)


@dataclass(frozen=True)
class CrossingReport:
    spec: CrossingSpec
    stable: bool
    west_to_east: bool
    west_isolated_south: bool
    north_to_south: bool
    north_isolated_east: bool
    details: Mapping = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return (
            self.stable
            and self.west_to_east
            and self.west_isolated_south
            and self.north_to_south
            and self.north_isolated_east
        )

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "stable": self.stable,
            "west_to_east": self.west_to_east,
            "west_isolated_south": self.west_isolated_south,
            "north_to_south": self.north_to_south,
            "north_isolated_east": self.north_isolated_east,
            "spec": {
                "n": self.spec.n,
                "north": self.spec.north,
                "east": self.spec.east,
                "south": self.spec.south,
                "west": self.spec.west,
            },
            "details": dict(self.details),
        }


def _support_in_square(config: Configuration, n: int) -> bool:
    return all(0 <= x < n and 0 <= y < n for x, y in config)


def verify_crossing(
    config: Configuration,
    nb: Neighborhood,
    spec: CrossingSpec,
    max_rounds: int = DEFAULT_ROUNDS,
) -> CrossingReport:
    """Run both seeded simulations and assemble the five-way report.

    `stable` also requires the support to lie inside the n x n square;
    a crossing is a property of the square's contents.
    """
    stable = is_stable(config, nb) and _support_in_square(config, spec.n)
    details: dict = {}
    if not stable:
        return CrossingReport(spec, False, False, False, False, False, details)

    west_rec = _watch_run(
        config.add(spec.west_seed()), nb, spec.east_cell(), spec.south_border(), max_rounds
    )
    north_rec = _watch_run(
        config.add(spec.north_seed()), nb, spec.south_cell(), spec.east_border(), max_rounds
    )
    details["west_run"] = {
        "witness_time": west_rec.witness_time,
        "rounds": west_rec.rounds,
        "fired": len(west_rec.fired),
        "first_violation": west_rec.first_violation,
    }
    details["north_run"] = {
        "witness_time": north_rec.witness_time,
        "rounds": north_rec.rounds,
        "fired": len(north_rec.fired),
        "first_violation": north_rec.first_violation,
    }
    return CrossingReport(
        spec,
        True,
        west_rec.transported,
        west_rec.isolation_ok,
        north_rec.transported,
        north_rec.isolation_ok,
        details,
    )


def transpose_configuration(config: Configuration) -> Configuration:
    return Configuration({(y, x): g for (x, y), g in config.items()})


def transpose_neighborhood(nb: Neighborhood) -> Neighborhood:
    return Neighborhood((dy, dx) for dx, dy in nb.vectors)


def transpose_spec(spec: CrossingSpec) -> CrossingSpec:
    """Swap the two transporter roles: west<->north and east<->south."""
    return CrossingSpec(
        n=spec.n,
        north=spec.west,
        east=spec.south,
        south=spec.east,
        west=spec.north,
    )
