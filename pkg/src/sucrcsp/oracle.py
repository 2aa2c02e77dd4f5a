"""Brute-force reference solver used as ground truth in tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .engine import Digraph
from .model import (
    Instance,
    PlanStep,
    ProductionPlan,
    build_digraph,
    check_plan,
    path_to_plan,
    plan_cost,
)

DEFAULT_MAX_PATHS = 10**6


class TooManyPaths(RuntimeError):
    pass


def enumerate_paths(g: Digraph, max_paths: int = DEFAULT_MAX_PATHS) -> list[tuple[int, ...]]:
    """All origin-destination paths as arc-id tuples, in lexicographic arc order."""
    paths: list[tuple[int, ...]] = []
    stack: list[int] = []

    def dfs(v):
        if v == g.destination:
            if len(paths) >= max_paths:
                raise TooManyPaths(f"more than {max_paths} origin-destination paths")
            paths.append(tuple(stack))
            return
        for a in sorted(g.out_arcs[v]):
            stack.append(a)
            dfs(g.heads[a])
            stack.pop()

    dfs(g.origin)
    return paths


def count_paths_from(g: Digraph) -> list[int]:
    """Number of paths from each vertex to the destination, by memoized recursion."""
    memo: dict[int, int] = {g.destination: 1}

    def count(v):
        if v not in memo:
            memo[v] = sum(count(g.heads[a]) for a in g.out_arcs[v])
        return memo[v]

    return [count(v) for v in range(g.n_vertices)]


def count_paths_to(g: Digraph) -> list[int]:
    """Number of paths from the origin to each vertex."""
    incoming: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for a, w in enumerate(g.heads):
        incoming[w].append(a)
    memo: dict[int, int] = {g.origin: 1}

    def count(v):
        if v not in memo:
            memo[v] = sum(count(g.tails[a]) for a in incoming[v])
        return memo[v]

    return [count(v) for v in range(g.n_vertices)]


def enumerate_plans(inst: Instance, max_plans: int = DEFAULT_MAX_PATHS) -> list[ProductionPlan]:
    """All chained production plans, built directly from the transition list."""
    by_init: dict = {}
    for a in inst.transitions:
        by_init.setdefault(a.s_init, []).append(a)
    T = inst.horizon
    plans = []
    steps: list[PlanStep] = []

    def rec(level, t):
        for a in by_init.get(level, ()):
            if t + a.tau > T:
                continue
            steps.append(PlanStep(level, t, a.id))
            if t + a.tau == T:
                if len(plans) >= max_plans:
                    raise TooManyPaths(f"more than {max_plans} production plans")
                plans.append(ProductionPlan(tuple(steps)))
            else:
                rec(a.s_final, t + a.tau)
            steps.pop()

    rec(inst.initial_level, 1)
    return plans


@dataclass
class BruteForceResult:
    cost: float
    plan: Optional[ProductionPlan]
    path: Optional[tuple[int, ...]]
    n_paths: int
    n_feasible: int

    @property
    def feasible(self) -> bool:
        return self.plan is not None


def brute_force_solve(inst: Instance, max_paths: int = DEFAULT_MAX_PATHS) -> BruteForceResult:
    teg = build_digraph(inst)
    paths = enumerate_paths(teg.digraph, max_paths)
    best_cost, best_plan, best_path = math.inf, None, None
    n_feasible = 0
    # paths come in lexicographic order, so strict < keeps the smallest on ties
    for p in paths:
        plan = path_to_plan(p, teg)
        if not check_plan(plan, inst).feasible:
            continue
        n_feasible += 1
        c = plan_cost(plan, inst)
        if c < best_cost:
            best_cost, best_plan, best_path = c, plan, p
    return BruteForceResult(best_cost, best_plan, best_path, len(paths), n_feasible)
