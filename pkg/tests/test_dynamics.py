import random

import pytest
from hypothesis import given, settings, strategies as st

from sandcross import (
    Configuration,
    Neighborhood,
    active_set,
    is_stable,
    moore,
    parallel_step,
    stabilize,
    stabilize_sequential,
    von_neumann,
)
from sandcross.errors import BudgetExhausted, NonConvergent

from oracles import (
    naive_parallel_step,
    naive_stabilize,
    random_configuration,
    random_neighborhood,
)


def test_von_neumann_radius1():
    nb = von_neumann(1)
    assert nb.p == 4
    assert nb.vectors == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert nb.is_symmetric()
    assert nb.has_noncollinear_pair()


def test_von_neumann_radius2_has_twelve_vectors():
    assert von_neumann(2).p == 12
    assert moore(1).p == 8


def test_neighborhood_rejects_origin_and_empty():
    with pytest.raises(ValueError):
        Neighborhood([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        Neighborhood([])


def test_single_step_frozen_example():
    # one active cell at (0,0) with 5 grains under the 4-vector diamond
    nb = von_neumann(1)
    c = Configuration({(0, 0): 5, (1, 0): 3})
    after, fired = parallel_step(c, nb)
    assert fired == {(0, 0)}
    assert after == Configuration(
        {(0, 0): 1, (1, 0): 4, (-1, 0): 1, (0, 1): 1, (0, -1): 1}
    )


def test_stabilize_frozen_pile_of_eight():
    nb = von_neumann(1)
    stable, odo = stabilize(Configuration({(0, 0): 8}), nb)
    assert stable == Configuration({(1, 0): 2, (-1, 0): 2, (0, 1): 2, (0, -1): 2})
    assert dict(odo.fire_count) == {(0, 0): 2}
    assert odo.steps == 2


def test_stabilize_frozen_pile_of_four():
    nb = von_neumann(1)
    stable, odo = stabilize(Configuration({(0, 0): 4}), nb)
    assert stable == Configuration({(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1})
    assert dict(odo.fire_count) == {(0, 0): 1}
    assert odo.steps == 1


def test_configuration_zero_elision_and_add():
    a = Configuration({(0, 0): 2, (1, 1): 0})
    b = Configuration({(0, 0): 1, (2, 2): 3})
    assert (1, 1) not in a
    assert a[(5, 5)] == 0
    merged = a.add(b)
    assert merged == Configuration({(0, 0): 3, (2, 2): 3})
    assert a == Configuration({(0, 0): 2})


def test_configuration_rejects_negative_and_bool():
    with pytest.raises(ValueError):
        Configuration({(0, 0): -1})
    with pytest.raises(ValueError):
        Configuration({(0, 0): True})


def test_collinear_neighborhood_raises_nonconvergent():
    nb = Neighborhood([(1, 0)])
    with pytest.raises(NonConvergent):
        stabilize(Configuration({(0, 0): 1}), nb, max_steps=50)


def test_collinear_neighborhood_may_still_converge():
    nb = Neighborhood([(1, 0), (-1, 0)])
    stable, odo = stabilize(Configuration({(0, 0): 2}), nb, max_steps=50)
    assert stable == Configuration({(1, 0): 1, (-1, 0): 1})
    assert odo.steps == 1


def test_budget_exhausted_for_spanning_neighborhood():
    nb = von_neumann(1)
    with pytest.raises(BudgetExhausted):
        stabilize(Configuration({(0, 0): 1000}), nb, max_steps=2)


def test_empty_configuration_is_stable():
    nb = von_neumann(1)
    stable, odo = stabilize(Configuration(), nb)
    assert stable == Configuration()
    assert odo.steps == 0 and odo.total_firings() == 0
    assert active_set(Configuration(), nb) == frozenset()


cells = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
small_configs = st.dictionaries(cells, st.integers(0, 12), max_size=10)

nb_pool = [
    von_neumann(1),
    von_neumann(2),
    moore(1),
    Neighborhood([(1, 0), (0, 1), (-1, -1)]),
    Neighborhood([(2, 1), (-1, 1), (0, -2), (1, 0), (-2, -1)]),
]


@settings(max_examples=60, deadline=None)
@given(grains=small_configs, nb_i=st.integers(0, len(nb_pool) - 1))
def test_parallel_step_matches_pull_oracle(grains, nb_i):
    nb = nb_pool[nb_i]
    mine, fired = parallel_step(Configuration(grains), nb)
    ref, ref_fired = naive_parallel_step({c: g for c, g in grains.items() if g}, nb.sorted_vectors)
    assert fired == ref_fired
    assert mine == Configuration(ref)


@settings(max_examples=40, deadline=None)
@given(grains=small_configs, nb_i=st.integers(0, len(nb_pool) - 1))
def test_stabilize_matches_oracle_and_conserves(grains, nb_i):
    nb = nb_pool[nb_i]
    c = Configuration(grains)
    stable, odo = stabilize(c, nb)
    ref_grains, ref_fires, ref_steps = naive_stabilize(dict(grains), nb.sorted_vectors)
    assert stable == Configuration(ref_grains)
    assert dict(odo.fire_count) == ref_fires
    assert odo.steps == ref_steps
    assert stable.total_grains() == c.total_grains()
    assert is_stable(stable, nb)


@settings(max_examples=30, deadline=None)
@given(grains=small_configs, nb_i=st.integers(0, len(nb_pool) - 1), seed=st.integers(0, 2**16))
def test_sequential_agrees_with_parallel(grains, nb_i, seed):
    nb = nb_pool[nb_i]
    c = Configuration(grains)
    stable_p, odo_p = stabilize(c, nb)
    stable_s, odo_s = stabilize_sequential(c, nb, order_seed=seed)
    assert stable_s == stable_p
    assert dict(odo_s.fire_count) == dict(odo_p.fire_count)
    assert odo_s.steps == odo_p.total_firings()


def test_dense_engine_agrees_with_oracle_on_wide_support():
    # force the dense code path with a support beyond the sparse threshold
    rng = random.Random(7)
    grains = random_configuration(rng, box=25, max_grains=9, density=0.8)
    nb = von_neumann(1)
    stable, odo = stabilize(Configuration(grains), nb)
    ref_grains, ref_fires, ref_steps = naive_stabilize(dict(grains), nb.sorted_vectors)
    assert stable == Configuration(ref_grains)
    assert dict(odo.fire_count) == ref_fires
    assert odo.steps == ref_steps


def test_determinism_same_inputs_same_outputs():
    rng = random.Random(11)
    vecs = random_neighborhood(rng)
    nb = Neighborhood(vecs)
    grains = random_configuration(rng, box=8, max_grains=3 * nb.p, density=0.5)
    c = Configuration(grains)
    a = stabilize(c, nb)
    b = stabilize(c, nb)
    assert a[0] == b[0] and dict(a[1].fire_count) == dict(b[1].fire_count)
    s1 = stabilize_sequential(c, nb, order_seed=42)
    s2 = stabilize_sequential(c, nb, order_seed=42)
    assert s1[0] == s2[0] and s1[1] == s2[1]


def test_big_single_pile_conserves_and_stabilizes():
    nb = von_neumann(1)
    c = Configuration({(0, 0): 4000})
    stable, odo = stabilize(c, nb)
    assert stable.total_grains() == 4000
    assert is_stable(stable, nb)
    # symmetric input, symmetric output
    assert all(stable[(x, y)] == stable[(-x, y)] == stable[(x, -y)] for x, y in stable)
