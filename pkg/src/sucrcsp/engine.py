"""Monoid resource constrained shortest path solver on acyclic digraphs.

The enumeration keeps a list of partial paths (labels), repeatedly extracts
one of minimum key, records it if it reaches the destination, and otherwise
extends it along every outgoing arc when the configured tests accept it:

* dominance (``use_dom``): reject a label if a stored label at the same vertex
  has a resource below it, otherwise store it and evict what it dominates;
* lower bound (``use_low``): reject a label if its resource completed by the
  vertex bound is infeasible or costs more than the incumbent.

Label setting processes whole vertices in topological order instead of single
labels.  Two backends run the same algorithm with identical statistics: a
compiled kernel (``sucrcsp._kernel``) and the pure-Python loops in this module.
"""
from __future__ import annotations

import heapq
import math
import os
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .monoid import (
    NEUTRAL,
    TOP,
    FullMonoid,
    FullResource,
    Limits,
    decode_full,
    encode_full,
    full_cost,
    full_leq,
    full_rho,
)

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

if os.environ.get("SUCRCSP_PURE_PYTHON"):
    _kernel = None

HAVE_KERNEL = _kernel is not None

LABEL_SETTING = "label-setting"
LABEL_CORRECTING = "label-correcting"
KEY_EARLY_DATE = "early-date"
KEY_COST = "cost"
KEY_COST_PLUS_BOUND = "cost-plus-bound"

_STRATEGY_CODE = {LABEL_SETTING: 0, LABEL_CORRECTING: 1}
_KEY_CODE = {KEY_EARLY_DATE: 0, KEY_COST: 1, KEY_COST_PLUS_BOUND: 2}


class GraphError(ValueError):
    pass


class MissingBoundsError(ValueError):
    pass


class Digraph:
    """Acyclic digraph with one :class:`FullResource` per arc.

    ``vertex_time`` gives the early-date key of each vertex and steers the
    topological order; it defaults to 0 everywhere.
    """

    def __init__(
        self,
        n_vertices: int,
        tails: Sequence[int],
        heads: Sequence[int],
        resources: Sequence[FullResource],
        origin: int,
        destination: int,
        monoid: FullMonoid,
        vertex_time: Optional[Sequence[int]] = None,
    ):
        if not (len(tails) == len(heads) == len(resources)):
            raise GraphError("tails, heads and resources must have equal length")
        for v in (origin, destination):
            if not 0 <= v < n_vertices:
                raise GraphError(f"vertex {v} out of range [0, {n_vertices})")
        for a, (u, w) in enumerate(zip(tails, heads)):
            if not (0 <= u < n_vertices and 0 <= w < n_vertices):
                raise GraphError(f"arc {a} ({u}->{w}) has an endpoint out of range")
        self.n_vertices = n_vertices
        self.tails = tuple(tails)
        self.heads = tuple(heads)
        self.resources = tuple(resources)
        self.origin = origin
        self.destination = destination
        self.monoid = monoid
        self.vertex_time = tuple(vertex_time) if vertex_time is not None else (0,) * n_vertices

        out: list[list[int]] = [[] for _ in range(n_vertices)]
        for a, u in enumerate(self.tails):
            out[u].append(a)
        self.out_arcs = tuple(tuple(x) for x in out)
        self.topo_order = self._topological_order()
        self.reaches_destination = self._reaches_destination()

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    def _topological_order(self) -> tuple[int, ...]:
        indeg = [0] * self.n_vertices
        for w in self.heads:
            indeg[w] += 1
        # Kahn's algorithm, smallest (time, id) first
        ready = [(self.vertex_time[v], v) for v in range(self.n_vertices) if indeg[v] == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            _, v = heapq.heappop(ready)
            order.append(v)
            for a in self.out_arcs[v]:
                w = self.heads[a]
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(ready, (self.vertex_time[w], w))
        if len(order) != self.n_vertices:
            raise GraphError("digraph has a cycle")
        return tuple(order)

    def _reaches_destination(self) -> tuple[bool, ...]:
        reach = [False] * self.n_vertices
        reach[self.destination] = True
        for v in reversed(self.topo_order):
            if not reach[v]:
                reach[v] = any(reach[self.heads[a]] for a in self.out_arcs[v])
        return tuple(reach)

    def path_resource(self, arcs: Sequence[int]) -> FullResource:
        return self.monoid.sum(self.resources[a] for a in arcs)

    @cached_property
    def flat(self) -> dict:
        """Array view consumed by the compiled kernel."""
        ints = np.zeros((self.n_arcs, 9), dtype=np.int64)
        cost = np.zeros(self.n_arcs, dtype=np.float64)
        for a, r in enumerate(self.resources):
            ints[a], cost[a] = encode_full(r)
        ptr = np.zeros(self.n_vertices + 1, dtype=np.int32)
        for v in range(self.n_vertices):
            ptr[v + 1] = ptr[v] + len(self.out_arcs[v])
        arcs = np.fromiter((a for v in range(self.n_vertices) for a in self.out_arcs[v]),
                           dtype=np.int32, count=self.n_arcs)
        return {
            "out_ptr": ptr,
            "out_arcs": arcs,
            "heads": np.asarray(self.heads, dtype=np.int32),
            "res": ints,
            "cost": cost,
            "topo": np.asarray(self.topo_order, dtype=np.int32),
            "vtime": np.asarray(self.vertex_time, dtype=np.int64),
            "reach": np.asarray(self.reaches_destination, dtype=np.uint8),
        }


class BoundsTable:
    """Per-vertex lower bounds on the resource of every vertex-to-destination path."""

    def __init__(self, ints: np.ndarray, cost: np.ndarray):
        self.ints = np.ascontiguousarray(ints, dtype=np.int64)
        self.cost = np.ascontiguousarray(cost, dtype=np.float64)

    @classmethod
    def from_resources(cls, resources: Sequence[FullResource]) -> "BoundsTable":
        ints = np.zeros((len(resources), 9), dtype=np.int64)
        cost = np.zeros(len(resources), dtype=np.float64)
        for v, r in enumerate(resources):
            ints[v], cost[v] = encode_full(r)
        return cls(ints, cost)

    def __len__(self):
        return len(self.cost)

    def __getitem__(self, v: int) -> FullResource:
        return decode_full(self.ints[v], self.cost[v])

    @cached_property
    def resources(self) -> tuple[FullResource, ...]:
        return tuple(self[v] for v in range(len(self)))

    def __eq__(self, other):
        if not isinstance(other, BoundsTable):
            return NotImplemented
        return np.array_equal(self.ints, other.ints) and np.array_equal(self.cost, other.cost)


@dataclass(frozen=True)
class AlgoConfig:
    strategy: str
    key: str
    use_dom: bool = True
    use_low: bool = False

    def __post_init__(self):
        if self.strategy not in _STRATEGY_CODE:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.key not in _KEY_CODE:
            raise ValueError(f"unknown key {self.key!r}")
        if self.strategy == LABEL_SETTING and self.key != KEY_EARLY_DATE:
            raise ValueError("label setting processes vertices in topological (early-date) order")

    @property
    def needs_bounds(self) -> bool:
        return self.use_low or self.key == KEY_COST_PLUS_BOUND

    @property
    def test_name(self) -> str:
        tests = [n for n, on in (("Dom", self.use_dom), ("Low", self.use_low)) if on]
        return " & ".join(tests) or "none"


PRESETS = {
    "v0": AlgoConfig(LABEL_SETTING, KEY_EARLY_DATE, use_dom=True, use_low=False),
    "v1": AlgoConfig(LABEL_SETTING, KEY_EARLY_DATE, use_dom=True, use_low=True),
    "v2": AlgoConfig(LABEL_CORRECTING, KEY_COST, use_dom=True, use_low=False),
    "v3": AlgoConfig(LABEL_CORRECTING, KEY_COST_PLUS_BOUND, use_dom=True, use_low=True),
    "key-only": AlgoConfig(LABEL_CORRECTING, KEY_COST_PLUS_BOUND, use_dom=True, use_low=False),
    "test-only": AlgoConfig(LABEL_CORRECTING, KEY_COST, use_dom=True, use_low=True),
}


@dataclass
class SolveStats:
    """Counters of one run.

    iterations: number of path extensions P + a (one monoid sum each).
        Every such label is later taken out and tested, so this is also the
        number of labels processed, the root excluded.
    discarded_dom: labels rejected by the dominance test, plus, for label
        setting, stored labels evicted before their vertex was extended.
    discarded_low: labels rejected by the lower bound test.
    od_paths: labels that reached the destination.
    """

    iterations: int = 0
    discarded_dom: int = 0
    discarded_low: int = 0
    od_paths: int = 0
    solve_time: float = 0.0
    bound_time: float = 0.0
    aborted: bool = False

    def counters(self) -> tuple[int, int, int, int]:
        return (self.iterations, self.discarded_dom, self.discarded_low, self.od_paths)


@dataclass
class SolveResult:
    path: Optional[list[int]]
    cost: float
    stats: SolveStats
    ub_history: list[float] = field(default_factory=list)
    explored_arcs: Optional[list[int]] = None

    @property
    def feasible(self) -> bool:
        return self.path is not None


@dataclass(slots=True)
class Label:
    resource: FullResource
    vertex: int
    parent: Optional["Label"] = None
    arc: int = -1
    key: float = 0.0

    def arcs(self) -> list[int]:
        out = []
        lab = self
        while lab.parent is not None:
            out.append(lab.arc)
            lab = lab.parent
        out.reverse()
        return out


def _resolve_backend(backend: str) -> str:
    if backend == "auto":
        return "compiled" if _kernel is not None else "python"
    if backend == "compiled" and _kernel is None:
        raise RuntimeError("compiled kernel is not available; build the extension or use backend='python'")
    if backend not in ("python", "compiled"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def compute_bounds(g: Digraph, backend: str = "auto") -> BoundsTable:
    """Lower bounds by one reverse topological sweep of meets.

    ``b_d`` is the neutral element and ``b_v`` is the meet of ``r_a + b_w``
    over outgoing arcs ``a = (v, w)``.  Vertices with no path to the
    destination keep the top element, whose infeasibility makes the lower
    bound test discard them.
    """
    if _resolve_backend(backend) == "compiled":
        f = g.flat
        ints, cost = _kernel.compute_bounds(
            f["out_ptr"], f["out_arcs"], f["heads"], f["res"], f["cost"], f["topo"],
            g.destination, g.monoid.tau_lay, g.monoid.tau_mod,
        )
        return BoundsTable(ints, cost)
    return BoundsTable.from_resources(_compute_bounds_py(g))


def _compute_bounds_py(g: Digraph) -> list[FullResource]:
    m = g.monoid
    bounds = [TOP] * g.n_vertices
    bounds[g.destination] = NEUTRAL
    for v in reversed(g.topo_order):
        if v == g.destination:
            continue
        b = TOP
        for a in g.out_arcs[v]:
            b = m.meet(b, m.oplus(g.resources[a], bounds[g.heads[a]]))
        bounds[v] = b
    return bounds


def dom_test(label: Label, frontier: Sequence[Label]) -> bool:
    """True if no label of ``frontier`` dominates ``label``."""
    r = label.resource
    return not any(full_leq(other.resource, r) for other in frontier)


def low_test(label: Label, bound: FullResource, ub: float, limits: Limits, monoid: FullMonoid) -> bool:
    projected = monoid.oplus(label.resource, bound)
    return full_rho(projected, limits) == 0 and full_cost(projected) <= ub


def key_of(label: Label, cfg: AlgoConfig, g: Digraph, bounds: Optional[BoundsTable] = None) -> float:
    if cfg.key == KEY_EARLY_DATE:
        return float(g.vertex_time[label.vertex])
    if cfg.key == KEY_COST:
        return full_cost(label.resource)
    if bounds is None:
        raise MissingBoundsError("cost-plus-bound key requires bounds")
    return full_cost(label.resource) + float(bounds.cost[label.vertex])


def solve(
    g: Digraph,
    limits: Limits,
    cfg: AlgoConfig,
    bounds: Optional[BoundsTable] = None,
    *,
    trace: bool = False,
    max_iterations: Optional[int] = None,
    backend: str = "auto",
) -> SolveResult:
    """Minimum cost feasible origin-destination path.

    Returns a result with ``path=None`` and ``cost=inf`` when no feasible path
    exists.  With ``max_iterations`` set, the run stops after that many
    extensions and ``stats.aborted`` is raised; the incumbent is then only an
    upper bound.
    """
    if cfg.needs_bounds and bounds is None:
        raise MissingBoundsError(f"{cfg} needs a bounds table")
    if bounds is not None and len(bounds) != g.n_vertices:
        raise ValueError("bounds table does not match the digraph")
    cap = -1 if max_iterations is None else int(max_iterations)
    t0 = time.perf_counter()
    if _resolve_backend(backend) == "compiled":
        result = _solve_compiled(g, limits, cfg, bounds, trace, cap)
    elif cfg.strategy == LABEL_SETTING:
        result = _label_setting_py(g, limits, cfg, bounds, trace, cap)
    else:
        result = _label_correcting_py(g, limits, cfg, bounds, trace, cap)
    result.stats.solve_time = time.perf_counter() - t0
    return result


def run(
    g: Digraph,
    limits: Limits,
    cfg: AlgoConfig,
    *,
    trace: bool = False,
    max_iterations: Optional[int] = None,
    backend: str = "auto",
) -> SolveResult:
    """Compute bounds when ``cfg`` needs them, then solve.

    ``stats.solve_time`` includes the bound computation, whose share is kept
    in ``stats.bound_time``.
    """
    bound_time = 0.0
    bounds = None
    if cfg.needs_bounds:
        t0 = time.perf_counter()
        bounds = compute_bounds(g, backend=backend)
        bound_time = time.perf_counter() - t0
    res = solve(g, limits, cfg, bounds, trace=trace, max_iterations=max_iterations, backend=backend)
    res.stats.bound_time = bound_time
    res.stats.solve_time += bound_time
    return res


def _solve_compiled(g, limits, cfg, bounds, trace, cap) -> SolveResult:
    f = g.flat
    if bounds is None:
        b_ints = np.zeros((0, 9), dtype=np.int64)
        b_cost = np.zeros(0, dtype=np.float64)
    else:
        b_ints, b_cost = bounds.ints, bounds.cost
    out = _kernel.solve(
        f["out_ptr"], f["out_arcs"], f["heads"], f["res"], f["cost"], f["topo"], f["vtime"], f["reach"],
        b_ints, b_cost, g.origin, g.destination, g.monoid.tau_lay, g.monoid.tau_mod,
        limits.n_max_startup, limits.n_max_layer, limits.n_max_deep,
        _STRATEGY_CODE[cfg.strategy], _KEY_CODE[cfg.key], cfg.use_dom, cfg.use_low, trace, cap,
    )
    path, ub, iters, ddom, dlow, od, aborted, ub_hist, explored = out
    stats = SolveStats(iters, ddom, dlow, od, aborted=bool(aborted))
    return SolveResult(path, ub, stats, list(ub_hist), explored if trace else None)


def _label_correcting_py(g, limits, cfg, bounds, trace, cap) -> SolveResult:
    m = g.monoid
    d = g.destination
    bres = bounds.resources if bounds is not None else None
    stats = SolveStats()
    explored = [] if trace else None
    ub, best, ub_hist = math.inf, None, []
    frontier: list[list[Label]] = [[] for _ in range(g.n_vertices)]

    root = Label(NEUTRAL, g.origin)
    root.key = key_of(root, cfg, g, bounds)
    seq = 0
    heap = [(root.key, seq, root)]
    while heap:
        _, _, lab = heapq.heappop(heap)
        v = lab.vertex
        if v == d:
            stats.od_paths += 1
            if full_rho(lab.resource, limits) == 0 and lab.resource.cost < ub:
                ub, best = lab.resource.cost, lab
                ub_hist.append(ub)
            continue
        if cfg.use_low and not low_test(lab, bres[v], ub, limits, m):
            stats.discarded_low += 1
            continue
        if cfg.use_dom:
            front = frontier[v]
            if not dom_test(lab, front):
                stats.discarded_dom += 1
                continue
            r = lab.resource
            front[:] = [o for o in front if not full_leq(r, o.resource)]
            front.append(lab)
        if 0 <= cap <= stats.iterations:
            stats.aborted = True
            break
        for a in g.out_arcs[v]:
            w = g.heads[a]
            if not g.reaches_destination[w]:
                continue
            child = Label(m.oplus(lab.resource, g.resources[a]), w, lab, a)
            child.key = key_of(child, cfg, g, bounds)
            stats.iterations += 1
            seq += 1
            heapq.heappush(heap, (child.key, seq, child))
            if trace:
                explored.append(a)
    return SolveResult(best.arcs() if best else None, ub, stats, ub_hist, explored)


def _label_setting_py(g, limits, cfg, bounds, trace, cap) -> SolveResult:
    m = g.monoid
    d = g.destination
    bres = bounds.resources if bounds is not None else None
    stats = SolveStats()
    explored = [] if trace else None
    ub, best, ub_hist = math.inf, None, []
    buckets: list[list[Label]] = [[] for _ in range(g.n_vertices)]
    buckets[g.origin].append(Label(NEUTRAL, g.origin))

    for v in g.topo_order:
        arrivals, buckets[v] = buckets[v], []
        if v == d:
            for lab in arrivals:
                stats.od_paths += 1
                if full_rho(lab.resource, limits) == 0 and lab.resource.cost < ub:
                    ub, best = lab.resource.cost, lab
                    ub_hist.append(ub)
            continue
        front: list[Label] = []
        for lab in arrivals:
            if cfg.use_low and not low_test(lab, bres[v], ub, limits, m):
                stats.discarded_low += 1
                continue
            if cfg.use_dom:
                if not dom_test(lab, front):
                    stats.discarded_dom += 1
                    continue
                r = lab.resource
                kept = [o for o in front if not full_leq(r, o.resource)]
                stats.discarded_dom += len(front) - len(kept)
                kept.append(lab)
                front = kept
            else:
                front.append(lab)
        if 0 <= cap <= stats.iterations:
            stats.aborted = True
            break
        for lab in front:
            for a in g.out_arcs[v]:
                w = g.heads[a]
                if not g.reaches_destination[w]:
                    continue
                buckets[w].append(Label(m.oplus(lab.resource, g.resources[a]), w, lab, a))
                stats.iterations += 1
                if trace:
                    explored.append(a)
    return SolveResult(best.arcs() if best else None, ub, stats, ub_hist, explored)
