import random
from dataclasses import replace

import pytest

from sucrcsp.model import (
    InstanceError,
    PlanError,
    PlanStep,
    ProductionPlan,
    Transition,
    build_digraph,
    check_chaining,
    check_plan,
    path_to_plan,
    plan_cost,
    plan_to_path,
    stay_put_plan,
    validate_instance,
)
from sucrcsp.monoid import INFEASIBLE, NEUTRAL, Change, Limits, Stay, full_rho
from sucrcsp.oracle import enumerate_paths

from conftest import chain_instance, small_instance, two_level_instance


def random_plan(inst, rng):
    """Random walk over transitions that ends exactly at the horizon."""
    by_init = {}
    for a in inst.transitions:
        by_init.setdefault(a.s_init, []).append(a)
    steps, level, t = [], inst.initial_level, 1
    while t < inst.horizon:
        options = [a for a in by_init[level] if t + a.tau <= inst.horizon]
        a = rng.choice(options)
        steps.append(PlanStep(level, t, a.id))
        level, t = a.s_final, t + a.tau
    return ProductionPlan(tuple(steps))


class TestValidation:
    def test_well_formed(self):
        assert validate_instance(small_instance(0)) == []
        assert validate_instance(chain_instance()) == []

    def test_missing_self_loop(self):
        inst = two_level_instance()
        inst = replace(inst, transitions=tuple(a for a in inst.transitions if a.id != "bb"))
        problems = validate_instance(inst)
        assert any("self-transition absent" in p for p in problems)

    def test_layer_flag_mismatch(self):
        inst = two_level_instance()
        bad = tuple(replace(a, is_layer_change=False) if a.id == "ab" else a for a in inst.transitions)
        assert any("layer_change flag" in p for p in validate_instance(replace(inst, transitions=bad)))

    def test_startup_needs_mode_change(self):
        inst = two_level_instance()
        bad = tuple(replace(a, is_startup=True) if a.id == "ab" else a for a in inst.transitions)
        assert any("startup" in p for p in validate_instance(replace(inst, transitions=bad)))

    def test_duration_range(self):
        inst = chain_instance(horizon=3)
        long = Transition("long", "s", "s", 3)
        problems = validate_instance(replace(inst, transitions=inst.transitions + (long,)))
        assert any("outside [1, 2]" in p for p in problems)

    def test_missing_cost(self):
        inst = chain_instance(horizon=3)
        costs = dict(inst.costs)
        del costs[(2, "loop")]
        assert any("t=2" in p for p in validate_instance(replace(inst, costs=costs)))

    def test_unknown_initial_level(self):
        assert any("initial_level" in p for p in validate_instance(replace(chain_instance(), initial_level="x")))

    def test_layer_spanning_modes(self):
        inst = two_level_instance()
        levels = (inst.levels[0], replace(inst.levels[1], layer="la", mode="off"))
        problems = validate_instance(replace(inst, levels=levels))
        assert any("spans modes" in p for p in problems)

    def test_build_rejects_invalid(self):
        with pytest.raises(InstanceError) as e:
            build_digraph(replace(chain_instance(), initial_level="x"))
        assert e.value.violations


class TestDigraph:
    def test_smallest_instance(self):
        teg = build_digraph(chain_instance(horizon=2))
        g = teg.digraph
        assert g.n_vertices == 4
        assert list(zip(g.tails, g.heads)) == [(0, 1), (1, 2), (2, 3)]

    def test_vertex_count(self):
        inst = small_instance(1)
        assert build_digraph(inst).digraph.n_vertices == len(inst.levels) * inst.horizon + 2

    def test_arc_count_matches_clipping(self):
        inst = small_instance(2)
        g = build_digraph(inst).digraph
        expected = 1 + len(inst.levels) + sum(inst.horizon - a.tau for a in inst.transitions)
        assert g.n_arcs == expected

    def test_long_transition_clipped(self):
        inst = chain_instance(horizon=5)
        inst = replace(inst, transitions=inst.transitions + (Transition("three", "s", "s", 3),),
                       costs={**inst.costs, (1, "three"): 0.0, (2, "three"): 0.0})
        teg = build_digraph(inst)
        assert ("three", 2) in teg.arc_index
        assert ("three", 3) not in teg.arc_index

    def test_initial_arc_credit(self):
        inst = replace(chain_instance(), tau_lay=4, tau_init_lay=1, tau_mod=2, tau_init_mod=5)
        teg = build_digraph(inst)
        r = teg.digraph.resources[teg.initial_arc]
        assert r.q_lay == Change(0, 3)
        assert r.q_mod == Change(0, 0)

    def test_arc_resources(self):
        inst = two_level_instance()
        teg = build_digraph(inst)
        g = teg.digraph
        stay = g.resources[teg.arc_index[("aa", 1)]]
        move = g.resources[teg.arc_index[("ab", 2)]]
        assert stay.q_lay == Stay(1) and stay.n_l == 0 and stay.cost == 1.0
        assert move.q_lay == Change(0, 0) and move.q_mod == Stay(1) and move.n_l == 1 and move.cost == 4.0
        assert all(g.resources[a] == NEUTRAL for a in teg.final_arcs.values())


class TestBijection:
    def test_smallest_round_trip(self):
        inst = chain_instance(horizon=2)
        teg = build_digraph(inst)
        (path,) = enumerate_paths(teg.digraph)
        plan = path_to_plan(path, teg)
        assert len(plan) == len(path) - 2
        assert plan_to_path(plan, teg) == list(path)

    def test_random_plans(self):
        rng = random.Random(0)
        for seed in range(20):
            inst = small_instance(seed)
            teg = build_digraph(inst)
            for _ in range(10):
                plan = random_plan(inst, rng)
                path = plan_to_path(plan, teg)
                assert path_to_plan(path, teg) == plan
                assert plan_cost(plan, inst) == teg.digraph.path_resource(path).cost

    def test_bad_path(self):
        teg = build_digraph(two_level_instance())
        with pytest.raises(PlanError):
            path_to_plan([], teg)
        with pytest.raises(PlanError):
            path_to_plan([teg.initial_arc, teg.final_arcs["b"]], teg)

    def test_bad_plan(self):
        inst = two_level_instance()
        plan = ProductionPlan((PlanStep("a", 1, "ab"), PlanStep("a", 2, "aa"), PlanStep("a", 3, "aa")))
        assert check_chaining(plan, inst)
        with pytest.raises(PlanError):
            plan_to_path(plan, build_digraph(inst))


class TestCheckPlan:
    def plan(self, *tids):
        inst = two_level_instance(horizon=len(tids) + 1)
        level = "a"
        steps = []
        for t, tid in enumerate(tids, start=1):
            steps.append(PlanStep(level, t, tid))
            level = tid[1]
        return inst, ProductionPlan(tuple(steps))

    def test_no_layer_change(self):
        inst, p = self.plan("aa", "aa", "aa")
        assert check_plan(p, replace(inst, tau_lay=9)).feasible

    def test_min_layer_duration(self):
        # b entered at t=2 and left at t=3, so t_j = t_{i+1} + tau_lay - 1 for tau_lay=2
        inst, p = self.plan("ab", "bb", "ba")
        assert "A" in check_plan(p, replace(inst, tau_lay=2)).rules
        assert check_plan(p, replace(inst, tau_lay=1)).feasible
        inst, p = self.plan("ab", "ba", "aa")
        assert "A" in check_plan(p, replace(inst, tau_lay=1)).rules
        assert check_plan(p, replace(inst, tau_lay=0)).feasible

    def test_initial_lockout(self):
        # tau_init_lay is the time still to wait before the first change
        inst, p = self.plan("ab", "bb", "bb")
        assert check_plan(p, replace(inst, tau_lay=2, tau_init_lay=0)).feasible
        assert "A" in check_plan(p, replace(inst, tau_lay=2, tau_init_lay=1)).rules
        inst, p = self.plan("aa", "ab", "bb")
        assert check_plan(p, replace(inst, tau_lay=2, tau_init_lay=1)).feasible

    def test_limits_are_inclusive(self):
        inst, p = self.plan("ab", "bb", "ba")
        assert check_plan(p, replace(inst, limits=Limits(0, 2, 0))).feasible
        report = check_plan(p, replace(inst, limits=Limits(0, 1, 0)))
        assert report.rules == {"D"} and report.n_layer == 2

    def test_rho_agrees_path_by_path(self):
        for seed in range(10):
            inst = small_instance(seed)
            teg = build_digraph(inst)
            for path in enumerate_paths(teg.digraph):
                plan = path_to_plan(path, teg)
                r = teg.digraph.path_resource(path)
                report = check_plan(plan, inst)
                assert (full_rho(r, inst.limits) == 0) == report.feasible
                assert (r.n_s, r.n_l, r.n_d) == (report.n_startup, report.n_layer, report.n_deep)
                assert ("A" in report.rules) == (r.q_lay is INFEASIBLE)


class TestPlanCost:
    def test_single_step(self):
        inst = chain_instance(horizon=2, cost=3.5)
        assert plan_cost(stay_put_plan(inst), inst) == 3.5

    def test_additive(self):
        inst = two_level_instance(horizon=5)
        steps = (PlanStep("a", 1, "ab"), PlanStep("b", 2, "bb"), PlanStep("b", 3, "ba"), PlanStep("a", 4, "aa"))
        whole = plan_cost(ProductionPlan(steps), inst)
        assert whole == sum(inst.costs[(s.time, s.transition)] for s in steps)

    def test_missing_entry(self):
        inst = chain_instance(horizon=3)
        with pytest.raises(PlanError):
            plan_cost(ProductionPlan((PlanStep("s", 9, "loop"),)), inst)


def test_stay_put_feasible():
    for seed in range(30):
        inst = small_instance(seed)
        assert check_plan(stay_put_plan(inst), inst).feasible
