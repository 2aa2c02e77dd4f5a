"""Lattice ordered monoids used as path resources.

Two layers live here:

* the minimum-duration monoid, whose elements are :class:`Stay`,
  :class:`Change` or :data:`INFEASIBLE`.  One instance parameterized by the
  minimum layer duration tracks layer changes, a second one parameterized by
  the minimum mode duration tracks mode changes;
* :class:`FullResource`, the product of both copies with three change
  counters and an additive cost.

The order is written ``q1 <= q2`` in prose ("q1 is better than q2").  Lower is
better everywhere: a path whose resource is below another one can replace it
in any completion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# Sentinel magnitude used by the "no path to destination" bound.  Real counts
# are bounded by the horizon length, which is orders of magnitude smaller.
NO_PATH_COUNT = 1 << 40


@dataclass(frozen=True, slots=True)
class Stay:
    """No change happened; ``a`` time steps were spent in the same layer."""

    a: int

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"negative duration in Stay({self.a})")


@dataclass(frozen=True, slots=True)
class Change:
    """At least one change: ``x`` steps in the first layer, ``y`` in the last."""

    x: int
    y: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError(f"negative duration in Change({self.x}, {self.y})")


class _Infeasible:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFEASIBLE"

    def __reduce__(self):
        return (_Infeasible, ())


INFEASIBLE = _Infeasible()

MinDurResource = Union[Stay, Change, _Infeasible]

STAY_ZERO = Stay(0)


def mindur_oplus(q1: MinDurResource, q2: MinDurResource, tau_min: int) -> MinDurResource:
    """Concatenate two minimum-duration resources (``q1`` first)."""
    if q1 is INFEASIBLE or q2 is INFEASIBLE:
        return INFEASIBLE
    if isinstance(q1, Stay):
        if isinstance(q2, Stay):
            return Stay(q1.a + q2.a)
        return Change(q1.a + q2.x, q2.y)
    if isinstance(q2, Stay):
        return Change(q1.x, q1.y + q2.a)
    # two changes: the layer in between must have lasted long enough
    if q1.y + q2.x < tau_min:
        return INFEASIBLE
    return Change(q1.x, q2.y)


def mindur_leq(q1: MinDurResource, q2: MinDurResource) -> bool:
    if q2 is INFEASIBLE:
        return True
    if q1 is INFEASIBLE:
        return False
    if isinstance(q1, Stay):
        if isinstance(q2, Stay):
            return q1.a >= q2.a
        return q1.a >= q2.x and q1.a >= q2.y
    if isinstance(q2, Stay):
        return False
    return q1.x >= q2.x and q1.y >= q2.y


def mindur_meet(q1: MinDurResource, q2: MinDurResource) -> MinDurResource:
    """Greatest lower bound of ``q1`` and ``q2``."""
    if q1 is INFEASIBLE:
        return q2
    if q2 is INFEASIBLE:
        return q1
    if isinstance(q1, Stay):
        if isinstance(q2, Stay):
            return Stay(max(q1.a, q2.a))
        return Stay(max(q1.a, q2.x, q2.y))
    if isinstance(q2, Stay):
        return Stay(max(q2.a, q1.x, q1.y))
    return Change(max(q1.x, q2.x), max(q1.y, q2.y))


def mindur_rho(q: MinDurResource) -> int:
    return 1 if q is INFEASIBLE else 0


@dataclass(frozen=True)
class MinDurMonoid:
    """Minimum-duration monoid for a fixed minimum duration ``tau_min``."""

    tau_min: int

    neutral = STAY_ZERO

    def oplus(self, q1: MinDurResource, q2: MinDurResource) -> MinDurResource:
        return mindur_oplus(q1, q2, self.tau_min)

    leq = staticmethod(mindur_leq)
    meet = staticmethod(mindur_meet)
    rho = staticmethod(mindur_rho)


@dataclass(frozen=True)
class Limits:
    """Maximum number of startups, layer changes and deep transitions."""

    n_max_startup: int
    n_max_layer: int
    n_max_deep: int

    def __post_init__(self):
        if min(self.n_max_startup, self.n_max_layer, self.n_max_deep) < 0:
            raise ValueError(f"limits must be non-negative: {self}")


@dataclass(frozen=True, slots=True)
class FullResource:
    q_lay: MinDurResource
    q_mod: MinDurResource
    n_s: int = 0
    n_l: int = 0
    n_d: int = 0
    cost: float = 0.0


NEUTRAL = FullResource(STAY_ZERO, STAY_ZERO, 0, 0, 0, 0.0)

# Top element: identity of the meet, used as the bound of vertices that cannot
# reach the destination.
TOP = FullResource(INFEASIBLE, INFEASIBLE, NO_PATH_COUNT, NO_PATH_COUNT, NO_PATH_COUNT, float("inf"))


def full_oplus(r1: FullResource, r2: FullResource, tau_lay: int, tau_mod: int) -> FullResource:
    n_s = r1.n_s + r2.n_s
    n_l = r1.n_l + r2.n_l
    n_d = r1.n_d + r2.n_d
    assert max(n_s, n_l, n_d) < (NO_PATH_COUNT << 2), "counter overflow"
    return FullResource(
        mindur_oplus(r1.q_lay, r2.q_lay, tau_lay),
        mindur_oplus(r1.q_mod, r2.q_mod, tau_mod),
        n_s,
        n_l,
        n_d,
        r1.cost + r2.cost,
    )


def full_leq(r1: FullResource, r2: FullResource) -> bool:
    return (
        r1.cost <= r2.cost
        and r1.n_s <= r2.n_s
        and r1.n_l <= r2.n_l
        and r1.n_d <= r2.n_d
        and mindur_leq(r1.q_lay, r2.q_lay)
        and mindur_leq(r1.q_mod, r2.q_mod)
    )


def full_meet(r1: FullResource, r2: FullResource) -> FullResource:
    return FullResource(
        mindur_meet(r1.q_lay, r2.q_lay),
        mindur_meet(r1.q_mod, r2.q_mod),
        min(r1.n_s, r2.n_s),
        min(r1.n_l, r2.n_l),
        min(r1.n_d, r2.n_d),
        min(r1.cost, r2.cost),
    )


def full_rho(r: FullResource, limits: Limits) -> int:
    """Infeasibility indicator: 1 if any component violates its constraint."""
    if r.q_lay is INFEASIBLE or r.q_mod is INFEASIBLE:
        return 1
    if r.n_s > limits.n_max_startup or r.n_l > limits.n_max_layer or r.n_d > limits.n_max_deep:
        return 1
    return 0


def full_cost(r: FullResource) -> float:
    return r.cost


@dataclass(frozen=True)
class FullMonoid:
    """Product monoid with the minimum layer and mode durations bound in."""

    tau_lay: int
    tau_mod: int

    neutral = NEUTRAL
    top = TOP

    def oplus(self, r1: FullResource, r2: FullResource) -> FullResource:
        return full_oplus(r1, r2, self.tau_lay, self.tau_mod)

    def sum(self, resources) -> FullResource:
        total = NEUTRAL
        for r in resources:
            total = full_oplus(total, r, self.tau_lay, self.tau_mod)
        return total

    leq = staticmethod(full_leq)
    meet = staticmethod(full_meet)
    rho = staticmethod(full_rho)
    cost = staticmethod(full_cost)


# Flat integer encoding shared with the compiled kernel.
KIND_STAY, KIND_CHANGE, KIND_INFEASIBLE = 0, 1, 2


def encode_mindur(q: MinDurResource) -> tuple[int, int, int]:
    if q is INFEASIBLE:
        return (KIND_INFEASIBLE, 0, 0)
    if isinstance(q, Stay):
        return (KIND_STAY, q.a, 0)
    return (KIND_CHANGE, q.x, q.y)


def decode_mindur(kind: int, x: int, y: int) -> MinDurResource:
    if kind == KIND_STAY:
        return Stay(int(x))
    if kind == KIND_CHANGE:
        return Change(int(x), int(y))
    return INFEASIBLE


def encode_full(r: FullResource) -> tuple[list[int], float]:
    return [*encode_mindur(r.q_lay), *encode_mindur(r.q_mod), r.n_s, r.n_l, r.n_d], r.cost


def decode_full(ints, cost: float) -> FullResource:
    return FullResource(
        decode_mindur(ints[0], ints[1], ints[2]),
        decode_mindur(ints[3], ints[4], ints[5]),
        int(ints[6]),
        int(ints[7]),
        int(ints[8]),
        float(cost),
    )
