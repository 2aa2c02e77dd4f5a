"""Seeded synthetic thermal units.

Layout of a generated unit: one offline mode holding a single ``off`` level,
and one online mode with ``n_layers`` power layers of ``levels_per_layer``
levels each.  Levels inside a layer share the same power output and differ by
the share sold as system services.  Transitions:

* self loops ``(s, s, 1)`` everywhere and moves between levels of a layer;
* ramps between adjacent layers (same services slot), jumps of two layers
  taking one extra step; drops of two layers or more are flagged deep;
* shutdown from the lowest layer and a multi-step startup back to it.

Costs are integers: per step, power times (marginal cost minus a sinusoidal
plus noise price), minus services revenue, plus a fixed online cost; a
startup also pays a surcharge.  The defaults (96 half-hour steps, 10 levels)
are assumptions sized to a two-day plan, not measured unit data.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .model import Instance, Level, Transition
from .monoid import Limits


@dataclass(frozen=True)
class GeneratorParams:
    horizon: int = 96
    n_layers: int = 3
    levels_per_layer: int = 3
    ramp_duration: tuple[int, int] = (1, 2)
    startup_duration: tuple[int, int] = (3, 5)
    tau_lay: tuple[int, int] = (3, 6)
    tau_mod: tuple[int, int] = (6, 12)
    max_startups: tuple[int, int] = (1, 3)
    max_layer_changes: tuple[int, int] = (4, 10)
    max_deep: tuple[int, int] = (1, 2)
    deep_drop: int = 2  # layers dropped by a deep transition
    p_min: float = 10.0
    p_max: float = 30.0
    marginal_cost: float = 35.0
    base_price: float = 40.0
    price_amplitude: float = 15.0
    price_period: int = 48
    noise_scale: float = 4.0
    services_price: float = 6.0
    fixed_online_cost: float = 60.0
    startup_cost: float = 1500.0
    offline_start_prob: float = 0.3
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                v = tuple(v)
                object.__setattr__(self, f.name, v)
            if isinstance(v, tuple):
                if len(v) != 2 or v[0] > v[1] or v[0] < 0:
                    raise ValueError(f"{f.name}: expected a non-empty range (lo, hi), got {v}")
        if self.horizon < 2:
            raise ValueError("horizon must be at least 2")
        if self.n_layers < 1 or self.levels_per_layer < 1:
            raise ValueError("need at least one online layer and one level per layer")
        if self.ramp_duration[0] < 1 or self.startup_duration[0] < 1:
            raise ValueError("transition durations must be at least 1")
        if max(self.startup_duration[1], self.ramp_duration[1] + 1) > self.horizon - 1:
            raise ValueError("transition durations must fit in the horizon")
        if self.deep_drop < 1:
            raise ValueError("deep_drop must be at least 1")
        if not 0.0 <= self.offline_start_prob <= 1.0:
            raise ValueError("offline_start_prob must be a probability")

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneratorParams":
        unknown = set(doc) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown generator parameters: {sorted(unknown)}")
        return cls(**doc)


def _randint(rng, lo_hi) -> int:
    lo, hi = lo_hi
    return int(rng.integers(lo, hi + 1))


def generate_instance(params: GeneratorParams) -> Instance:
    rng = np.random.default_rng(params.seed)
    T = params.horizon
    L, K = params.n_layers, params.levels_per_layer

    levels = [Level("off", "off", "offline", 0.0)]
    power = {"off": 0.0}
    services = {"off": 0.0}
    grid = {}
    for k in range(L):
        p = params.p_min if L == 1 else params.p_min + k * (params.p_max - params.p_min) / (L - 1)
        for j in range(K):
            sid = f"L{k}s{j}"
            levels.append(Level(sid, f"L{k}", "online", p))
            grid[k, j] = sid
            power[sid] = p
            services[sid] = 0.0 if K == 1 else 0.3 * p * j / (K - 1)

    transitions = []

    layer_of = {s.id: s.layer for s in levels}

    def add(src, dst, tau, startup=False, deep=False):
        transitions.append(Transition(f"a{len(transitions)}", src, dst, tau, startup,
                                      layer_of[src] != layer_of[dst], deep))

    for s in levels:
        add(s.id, s.id, 1)
    for k in range(L):
        for j in range(K):
            for j2 in range(K):
                if j2 != j:
                    add(grid[k, j], grid[k, j2], 1)
    for k in range(L):
        for j in range(K):
            for step in (-2, -1, 1, 2):
                k2 = k + step
                if 0 <= k2 < L:
                    tau = _randint(rng, params.ramp_duration) + (abs(step) - 1)
                    add(grid[k, j], grid[k2, j], tau, deep=-step >= params.deep_drop)
    add(grid[0, 0], "off", 1)
    add("off", grid[0, 0], _randint(rng, params.startup_duration), startup=True)

    u = np.arange(1, T + 1)
    phase = rng.uniform(0, 2 * math.pi)
    price = (params.base_price + params.price_amplitude * np.sin(2 * math.pi * u / params.price_period + phase)
             + rng.normal(0.0, params.noise_scale, size=T))
    svc_price = params.services_price * (1.0 + 0.5 * rng.uniform(-1, 1, size=T))

    def step_cost(sid, t):
        if sid == "off":
            return 0.0
        return (power[sid] * (params.marginal_cost - price[t - 1]) - services[sid] * svc_price[t - 1]
                + params.fixed_online_cost)

    costs = {}
    for a in transitions:
        for t in range(1, T - a.tau + 1):
            if a.is_startup:
                c = params.startup_cost  # warming steps produce nothing
            else:
                # stay at the initial level for the first half, the final one after
                half = a.tau // 2
                c = sum(step_cost(a.s_init if i < max(half, 1) else a.s_final, t + i) for i in range(a.tau))
            costs[(t, a.id)] = float(round(c))

    if rng.uniform() < params.offline_start_prob:
        initial = "off"
    else:
        initial = grid[_randint(rng, (0, L - 1)), _randint(rng, (0, K - 1))]
    tau_lay = _randint(rng, params.tau_lay)
    tau_mod = _randint(rng, params.tau_mod)
    return Instance(
        horizon=T,
        levels=tuple(levels),
        transitions=tuple(transitions),
        tau_lay=tau_lay,
        tau_mod=tau_mod,
        tau_init_lay=_randint(rng, (0, tau_lay)),
        tau_init_mod=_randint(rng, (0, tau_mod)),
        limits=Limits(_randint(rng, params.max_startups), _randint(rng, params.max_layer_changes),
                      _randint(rng, params.max_deep)),
        initial_level=initial,
        costs=costs,
    )


def instance_seeds(seed: int, count: int) -> list[int]:
    """Independent per-instance seeds derived from one corpus seed."""
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1)[0]) for c in ss.spawn(count)]


def generate_corpus(params: GeneratorParams, count: int, seed: int) -> list[Instance]:
    from dataclasses import replace

    return [generate_instance(replace(params, seed=s)) for s in instance_seeds(seed, count)]


SMALL_PARAMS = GeneratorParams(
    horizon=10,
    n_layers=2,
    levels_per_layer=2,
    ramp_duration=(1, 2),
    startup_duration=(2, 3),
    tau_lay=(1, 3),
    tau_mod=(2, 4),
    max_startups=(0, 2),
    max_layer_changes=(1, 4),
    max_deep=(0, 1),
    deep_drop=1,
    startup_cost=200.0,
    price_period=8,
)
