from dataclasses import replace
from pathlib import Path

import pytest

from sucrcsp import engine
from sucrcsp.generator import SMALL_PARAMS, generate_instance
from sucrcsp.instance_io import read_instance
from sucrcsp.model import Instance, Level, Transition, build_digraph
from sucrcsp.monoid import Limits

DATA = Path(__file__).resolve().parent.parent / "data"

BACKENDS = ["python"] + (["compiled"] if engine.HAVE_KERNEL else [])


def small_instance(seed: int) -> Instance:
    return generate_instance(replace(SMALL_PARAMS, seed=seed))


def chain_instance(horizon: int = 2, cost: float = 1.0) -> Instance:
    """One level with only its self loop: a single plan."""
    return Instance(
        horizon=horizon,
        levels=(Level("s", "l", "m"),),
        transitions=(Transition("loop", "s", "s", 1),),
        tau_lay=1, tau_mod=1, tau_init_lay=0, tau_init_mod=0,
        limits=Limits(0, 0, 0),
        initial_level="s",
        costs={(t, "loop"): cost for t in range(1, horizon)},
    )


def two_level_instance(horizon: int = 4) -> Instance:
    """Two levels in distinct layers of one mode, all moves of length one."""
    levels = (Level("a", "la", "on"), Level("b", "lb", "on"))
    transitions = (
        Transition("aa", "a", "a", 1),
        Transition("bb", "b", "b", 1),
        Transition("ab", "a", "b", 1, is_layer_change=True),
        Transition("ba", "b", "a", 1, is_layer_change=True),
    )
    costs = {(t, a.id): float(t + i) for t in range(1, horizon) for i, a in enumerate(transitions)}
    return Instance(horizon, levels, transitions, 1, 1, 0, 0, Limits(0, 99, 0), "a", costs)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def toy():
    return read_instance(DATA / "toy_instance.json")


@pytest.fixture
def toy_graph(toy):
    return build_digraph(toy)


@pytest.fixture
def data_dir():
    return DATA
