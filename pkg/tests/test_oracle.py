from dataclasses import replace

import pytest

from sucrcsp.engine import Digraph
from sucrcsp.model import build_digraph
from sucrcsp.monoid import NEUTRAL, FullMonoid, Limits
from sucrcsp.oracle import (
    TooManyPaths,
    brute_force_solve,
    count_paths_from,
    count_paths_to,
    enumerate_paths,
    enumerate_plans,
)

from conftest import chain_instance, small_instance, two_level_instance


def test_chain_has_one_path():
    g = build_digraph(chain_instance(horizon=6)).digraph
    assert len(enumerate_paths(g)) == 1


def test_two_parallel_arcs():
    g = Digraph(3, [0, 1, 1], [1, 2, 2], [NEUTRAL] * 3, 0, 2, FullMonoid(1, 1))
    assert enumerate_paths(g) == [(0, 1), (0, 2)]


def test_two_levels_closed_form():
    # every step picks one of two levels: 2^(T-1) walks
    g = build_digraph(two_level_instance(horizon=4)).digraph
    paths = enumerate_paths(g)
    assert len(paths) == 2 ** 3 == count_paths_from(g)[g.origin]
    assert len(set(paths)) == len(paths)


def test_counts_agree_on_small_instances():
    for seed in range(10):
        inst = small_instance(seed)
        g = build_digraph(inst).digraph
        n = len(enumerate_paths(g))
        assert n == count_paths_from(g)[g.origin] == count_paths_to(g)[g.destination]
        assert n == len(enumerate_plans(inst))


def test_guard():
    g = build_digraph(two_level_instance(horizon=6)).digraph
    with pytest.raises(TooManyPaths):
        enumerate_paths(g, max_paths=10)


def test_no_layer_change_allowed():
    inst = replace(two_level_instance(horizon=3), limits=Limits(0, 0, 0))
    res = brute_force_solve(inst)
    assert res.n_feasible == 1
    assert [s.transition for s in res.plan] == ["aa", "aa"]


def test_infeasible_fixture(data_dir):
    from sucrcsp.instance_io import read_instance

    res = brute_force_solve(read_instance(data_dir / "infeasible_instance.json"))
    assert not res.feasible and res.n_feasible == 0


def test_single_feasible_plan():
    inst = chain_instance(horizon=4, cost=1.5)
    res = brute_force_solve(inst)
    assert res.cost == 4.5 and res.n_paths == 1


def test_toy_optimum(toy):
    res = brute_force_solve(toy)
    assert res.cost == -2.0
    assert [s.transition for s in res.plan] == ["startup", "stay_on", "stay_on"]
    assert (res.n_paths, res.n_feasible) == (8, 4)
