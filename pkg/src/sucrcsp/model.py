"""Single unit commitment instances and their time-expanded digraph.

A production plan is a chain of transitions starting at level ``initial_level``
at time 1 and landing exactly at the horizon ``T``.  Plans are in bijection
with origin-destination paths of the digraph built by :func:`build_digraph`.

Minimum durations.  ``tau_init_lay`` is the number of steps that must elapse
before the unit may leave the layer it starts in (the start behaves like a
layer change that happened ``tau_lay - tau_init_lay`` steps before time 1);
``tau_init_mod`` is the same for modes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

from .engine import Digraph
from .monoid import (
    FullMonoid,
    FullResource,
    Limits,
    Change,
    Stay,
    STAY_ZERO,
    NEUTRAL,
)

LevelId = Hashable


class InstanceError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid instance: " + "; ".join(self.violations))


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class Level:
    id: LevelId
    layer: Hashable
    mode: Hashable
    power: float = 0.0


@dataclass(frozen=True)
class Transition:
    id: Hashable
    s_init: LevelId
    s_final: LevelId
    tau: int
    is_startup: bool = False
    is_layer_change: bool = False
    is_deep: bool = False


@dataclass(frozen=True, eq=True)
class Instance:
    horizon: int
    levels: tuple[Level, ...]
    transitions: tuple[Transition, ...]
    tau_lay: int
    tau_mod: int
    tau_init_lay: int
    tau_init_mod: int
    limits: Limits
    initial_level: LevelId
    costs: dict = field(hash=False)  # (t, transition id) -> cost

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "transitions", tuple(self.transitions))

    @property
    def level_by_id(self) -> dict:
        return {s.id: s for s in self.levels}

    @property
    def transition_by_id(self) -> dict:
        return {a.id: a for a in self.transitions}

    def is_layer_change(self, a: Transition) -> bool:
        lv = self.level_by_id
        return lv[a.s_init].layer != lv[a.s_final].layer

    def is_mode_change(self, a: Transition) -> bool:
        lv = self.level_by_id
        return lv[a.s_init].mode != lv[a.s_final].mode


@dataclass(frozen=True)
class PlanStep:
    level: LevelId
    time: int
    transition: Hashable


@dataclass(frozen=True)
class ProductionPlan:
    steps: tuple[PlanStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def validate_instance(inst: Instance) -> list[str]:
    """Return the list of violated invariants (empty when the instance is valid)."""
    out: list[str] = []
    try:
        T = int(inst.horizon)
    except (TypeError, ValueError):
        return [f"horizon: not an integer ({inst.horizon!r})"]
    if T < 2:
        out.append(f"horizon: must be at least 2 (transitions last one step or more), got {T}")
    for name in ("tau_lay", "tau_mod", "tau_init_lay", "tau_init_mod"):
        val = getattr(inst, name)
        if not isinstance(val, int) or val < 0:
            out.append(f"{name}: must be a non-negative integer, got {val!r}")

    levels = {}
    for s in inst.levels:
        if s.id in levels:
            out.append(f"level {s.id!r}: duplicate id")
        levels[s.id] = s
    if not levels:
        out.append("levels: empty")
    # every layer belongs to exactly one mode
    layer_mode = {}
    for s in inst.levels:
        m = layer_mode.setdefault(s.layer, s.mode)
        if m != s.mode:
            out.append(f"layer {s.layer!r}: spans modes {m!r} and {s.mode!r}")

    if inst.initial_level not in levels:
        out.append(f"initial_level: unknown level {inst.initial_level!r}")

    tids = set()
    self_loops = set()
    for a in inst.transitions:
        where = f"transition {a.id!r}"
        if a.id in tids:
            out.append(f"{where}: duplicate id")
        tids.add(a.id)
        if a.s_init not in levels or a.s_final not in levels:
            out.append(f"{where}: unknown level")
            continue
        if not isinstance(a.tau, int) or not 1 <= a.tau <= T - 1:
            out.append(f"{where}: duration {a.tau!r} outside [1, {T - 1}]")
        src, dst = levels[a.s_init], levels[a.s_final]
        if a.is_layer_change != (src.layer != dst.layer):
            out.append(f"{where}: layer_change flag is {a.is_layer_change} but layers "
                       f"{src.layer!r} -> {dst.layer!r}")
        if a.is_startup and src.mode == dst.mode:
            out.append(f"{where}: flagged startup without a mode change")
        if a.s_init == a.s_final and a.tau == 1:
            self_loops.add(a.s_init)
    for sid in levels:
        if sid not in self_loops:
            out.append(f"level {sid!r}: self-transition absent ({sid!r}, {sid!r}, 1)")

    if inst.limits is None or min(inst.limits.n_max_startup, inst.limits.n_max_layer,
                                  inst.limits.n_max_deep) < 0:
        out.append("limits: must be non-negative")

    for a in inst.transitions:
        if not isinstance(a.tau, int) or a.tau < 1:
            continue
        for t in range(1, T - a.tau + 1):
            if (t, a.id) not in inst.costs:
                out.append(f"costs: missing entry for t={t}, transition {a.id!r}")
    for (t, tid) in inst.costs:
        if tid not in tids:
            out.append(f"costs: entry for unknown transition {tid!r}")
    return out


@dataclass(frozen=True)
class TimeExpandedGraph:
    """Digraph of an instance plus the maps back to levels, times and transitions.

    ``arc_info[a]`` is ``(transition id, t)`` for transition arcs and ``None``
    for the initial and final arcs.
    """

    instance: Instance
    digraph: Digraph
    vertex_of: dict  # (level id, t) -> vertex
    vertex_info: tuple  # vertex -> (level id, t), None for origin/destination
    arc_info: tuple
    arc_index: dict  # (transition id, t) -> arc
    initial_arc: int
    final_arcs: dict  # level id -> arc


def initial_credit(tau_min: int, tau_init: int) -> int:
    return max(0, tau_min - tau_init)


def transition_resource(inst: Instance, a: Transition, t: int) -> FullResource:
    q_lay = Change(0, 0) if inst.is_layer_change(a) else Stay(a.tau)
    q_mod = Change(0, 0) if inst.is_mode_change(a) else Stay(a.tau)
    return FullResource(q_lay, q_mod, int(a.is_startup), int(a.is_layer_change),
                        int(a.is_deep), float(inst.costs[(t, a.id)]))


def build_digraph(inst: Instance, check: bool = True) -> TimeExpandedGraph:
    if check:
        problems = validate_instance(inst)
        if problems:
            raise InstanceError(problems)
    T = inst.horizon
    n_levels = len(inst.levels)
    origin = 0
    dest = n_levels * T + 1
    vertex_of = {}
    vertex_info: list = [None] * (dest + 1)
    vertex_time = [0] * (dest + 1)
    vertex_time[dest] = T + 1
    for i, s in enumerate(inst.levels):
        for t in range(1, T + 1):
            v = 1 + i * T + (t - 1)
            vertex_of[(s.id, t)] = v
            vertex_info[v] = (s.id, t)
            vertex_time[v] = t

    tails, heads, resources, arc_info = [], [], [], []

    def add(u, w, r, info):
        tails.append(u)
        heads.append(w)
        resources.append(r)
        arc_info.append(info)
        return len(tails) - 1

    start = FullResource(
        Change(0, initial_credit(inst.tau_lay, inst.tau_init_lay)),
        Change(0, initial_credit(inst.tau_mod, inst.tau_init_mod)),
    )
    initial_arc = add(origin, vertex_of[(inst.initial_level, 1)], start, None)
    arc_index = {}
    for t in range(1, T):
        for a in inst.transitions:
            if t + a.tau <= T:
                arc_index[(a.id, t)] = add(vertex_of[(a.s_init, t)], vertex_of[(a.s_final, t + a.tau)],
                                           transition_resource(inst, a, t), (a.id, t))
    final_arcs = {}
    for s in inst.levels:
        final_arcs[s.id] = add(vertex_of[(s.id, T)], dest, NEUTRAL, None)

    g = Digraph(dest + 1, tails, heads, resources, origin, dest,
                FullMonoid(inst.tau_lay, inst.tau_mod), vertex_time)
    return TimeExpandedGraph(inst, g, vertex_of, tuple(vertex_info), tuple(arc_info), arc_index,
                             initial_arc, final_arcs)


def path_to_plan(path: Sequence[int], teg: TimeExpandedGraph) -> ProductionPlan:
    g = teg.digraph
    if not path:
        raise PlanError("empty path")
    if path[0] != teg.initial_arc:
        raise PlanError("path does not start with the initial arc")
    if g.heads[path[-1]] != g.destination:
        raise PlanError("path does not end at the destination")
    for a, b in zip(path, path[1:]):
        if g.heads[a] != g.tails[b]:
            raise PlanError(f"arcs {a} and {b} are not consecutive")
    steps = []
    for a in path[1:-1]:
        tid, t = teg.arc_info[a]
        level, _ = teg.vertex_info[g.tails[a]]
        steps.append(PlanStep(level, t, tid))
    if not steps:
        raise PlanError("path carries no transition")
    return ProductionPlan(tuple(steps))


def plan_to_path(plan: ProductionPlan, teg: TimeExpandedGraph) -> list[int]:
    problems = check_chaining(plan, teg.instance)
    if problems:
        raise PlanError("; ".join(problems))
    path = [teg.initial_arc]
    for step in plan:
        path.append(teg.arc_index[(step.transition, step.time)])
    last = teg.instance.transition_by_id[plan.steps[-1].transition]
    path.append(teg.final_arcs[last.s_final])
    return path


def check_chaining(plan: ProductionPlan, inst: Instance) -> list[str]:
    """Chaining conditions of a production plan; returns the violations."""
    trans = inst.transition_by_id
    steps = plan.steps
    if not steps:
        return ["plan is empty"]
    out = []
    if steps[0].level != inst.initial_level:
        out.append(f"first level {steps[0].level!r} is not the initial level {inst.initial_level!r}")
    if steps[0].time != 1:
        out.append(f"first time is {steps[0].time}, expected 1")
    for i, st in enumerate(steps):
        a = trans.get(st.transition)
        if a is None:
            out.append(f"step {i}: unknown transition {st.transition!r}")
            return out
        if a.s_init != st.level:
            out.append(f"step {i}: transition {a.id!r} does not start at level {st.level!r}")
        if i + 1 < len(steps):
            nxt = steps[i + 1]
            if a.s_final != nxt.level:
                out.append(f"step {i}: transition ends at {a.s_final!r}, next level is {nxt.level!r}")
            if st.time + a.tau != nxt.time:
                out.append(f"step {i}: time {st.time} + {a.tau} != next time {nxt.time}")
        elif st.time + a.tau != inst.horizon:
            out.append(f"last step ends at {st.time + a.tau}, horizon is {inst.horizon}")
    return out


@dataclass
class FeasibilityReport:
    violations: list[tuple[str, str]]  # (rule letter, message)
    n_startup: int
    n_layer: int
    n_deep: int

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def rules(self) -> set[str]:
        return {r for r, _ in self.violations}


def _min_duration_violations(plan, inst, group_of, tau_min, tau_init, rule):
    """Between consecutive changes i < j of group, require t_j >= t_{i+1} + tau_min.

    The start counts as a change that happened ``credit`` steps before time 1.
    """
    trans = inst.transition_by_id
    steps = plan.steps
    out = []
    # time at which the current group was entered
    entered = 1 - initial_credit(tau_min, tau_init)
    entered_by = "start"
    for i, st in enumerate(steps):
        a = trans[st.transition]
        if group_of(a.s_init) != group_of(a.s_final):
            if st.time < entered + tau_min:
                out.append((rule, f"change at t={st.time} only {st.time - entered} steps after "
                                  f"{entered_by}, minimum {tau_min}"))
            entered = st.time + a.tau  # = t_{i+1}
            entered_by = f"change at t={st.time}"
    return out


def check_plan(plan: ProductionPlan, inst: Instance) -> FeasibilityReport:
    """Check constraints (A)-(E) directly on the plan, without any monoid."""
    problems = check_chaining(plan, inst)
    if problems:
        raise PlanError("; ".join(problems))
    lv = inst.level_by_id
    trans = inst.transition_by_id
    violations = []
    violations += _min_duration_violations(plan, inst, lambda s: lv[s].layer,
                                           inst.tau_lay, inst.tau_init_lay, "A")
    violations += _min_duration_violations(plan, inst, lambda s: lv[s].mode,
                                           inst.tau_mod, inst.tau_init_mod, "B")
    used = [trans[st.transition] for st in plan]
    n_s = sum(1 for a in used if a.is_startup)
    n_l = sum(1 for a in used if a.is_layer_change)
    n_d = sum(1 for a in used if a.is_deep)
    lim = inst.limits
    if n_s > lim.n_max_startup:
        violations.append(("C", f"{n_s} startups > {lim.n_max_startup}"))
    if n_l > lim.n_max_layer:
        violations.append(("D", f"{n_l} layer changes > {lim.n_max_layer}"))
    if n_d > lim.n_max_deep:
        violations.append(("E", f"{n_d} deep transitions > {lim.n_max_deep}"))
    return FeasibilityReport(violations, n_s, n_l, n_d)


def plan_cost(plan: ProductionPlan, inst: Instance) -> float:
    total = 0.0
    for st in plan:
        try:
            total += inst.costs[(st.time, st.transition)]
        except KeyError:
            raise PlanError(f"no cost for transition {st.transition!r} at t={st.time}") from None
    return total


def stay_put_plan(inst: Instance) -> ProductionPlan:
    """Plan that repeats the initial level's self-transition until the horizon."""
    loop = next(a for a in inst.transitions
                if a.s_init == a.s_final == inst.initial_level and a.tau == 1)
    return ProductionPlan(tuple(PlanStep(inst.initial_level, t, loop.id)
                                for t in range(1, inst.horizon)))
