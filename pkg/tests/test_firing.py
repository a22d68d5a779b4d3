import pytest

from sandcross.crossing import CrossingSpec
from sandcross.errors import NotACrossing
from sandcross.firing import disjointify, extract_firing_graph
from sandcross.grid import Configuration, von_neumann
from sandcross.shapes import discretize, unit_disk
from sandcross.synthesis import synthesize


def test_empty_seed_gives_empty_graph():
    nb = von_neumann(1)
    g = extract_firing_graph(Configuration({(0, 0): 3}), Configuration({}), nb)
    assert g.vertices == frozenset()
    assert g.arcs == frozenset()


def test_single_firing_cell():
    nb = von_neumann(1)
    g = extract_firing_graph(
        Configuration({(0, 0): 3}), Configuration({(0, 0): 1}), nb
    )
    assert g.vertices == {(0, 0)}
    assert g.fire_time[(0, 0)] == 0
    assert g.arcs == frozenset()


def test_two_cell_cascade_has_one_arc():
    nb = von_neumann(1)
    g = extract_firing_graph(
        Configuration({(0, 0): 3, (1, 0): 3}), Configuration({(0, 0): 1}), nb
    )
    assert g.vertices == {(0, 0), (1, 0)}
    assert g.arcs == {((0, 0), (1, 0))}
    assert g.fire_time[(0, 0)] == 0 and g.fire_time[(1, 0)] == 1


def test_wire_arcs_point_along_the_wave():
    nb = von_neumann(1)
    row = Configuration({(x, 0): 3 for x in range(6)})
    g = extract_firing_graph(row, Configuration({(0, 0): 1}), nb)
    assert g.sorted_fired() == [(x, 0, x) for x in range(6)]
    assert g.sorted_arcs() == [((x, 0), (x + 1, 0)) for x in range(5)]
    assert g.out_neighbors((2, 0)) == {(3, 0)}
    assert g.in_neighbors((2, 0)) == {(1, 0)}
    assert g.in_neighbors((0, 0)) == frozenset()


def test_disjointify_identity_on_disjoint_crossing():
    config, spec = synthesize(unit_disk(), 19)
    nb = discretize(unit_disk(), 19)
    rebuilt = disjointify(config, nb, spec)
    assert rebuilt.sorted_items() == config.sorted_items()


def test_disjointify_rejects_non_crossing():
    nb = von_neumann(1)
    spec = CrossingSpec(n=5, north=2, east=2, south=2, west=2)
    with pytest.raises(NotACrossing):
        disjointify(Configuration({}), nb, spec)
