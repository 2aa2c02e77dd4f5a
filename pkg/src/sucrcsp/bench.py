"""Benchmark harness comparing algorithm presets across an instance corpus.

Counter definitions (identical for both backends):

iterations       path extensions P + a performed (one monoid sum each), which
                 is also the number of labels processed, the root excluded
discarded Dom    labels rejected by the dominance test; for label setting also
                 stored labels evicted before their vertex was extended
discarded Low    labels rejected by the lower bound test
# od paths       labels that reached the destination
solving time     median wall-clock over repetitions, bounds included (ms)
bound computation  share of the solving time spent computing bounds (%)
solving time ratio solving time divided by the V0 solving time
"""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .engine import PRESETS, SolveResult, run
from .model import Instance, build_digraph

TABLE_ROWS = (
    "iterations",
    "discarded Dom",
    "discarded Low",
    "# od paths",
    "solving time (ms)",
    "bound computation (%)",
    "solving time ratio",
)
CSV_HEADER = ("instance", "preset", "type", "key", "test", *TABLE_ROWS, "cost", "aborted")
WALL_CLOCK_COLUMNS = ("solving time (ms)", "bound computation (%)", "solving time ratio")
BASELINE = "v0"


@dataclass
class BenchRow:
    instance: str
    preset: str
    iterations: int
    discarded_dom: int
    discarded_low: int
    od_paths: int
    solve_ms: float
    bound_ms: float
    cost: float
    aborted: bool
    ratio: Optional[float] = None

    @property
    def bound_pct(self) -> float:
        return 100.0 * self.bound_ms / self.solve_ms if self.solve_ms > 0 else 0.0


@dataclass
class BenchReport:
    presets: list[str]
    rows: list[BenchRow] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def by_preset(self, preset: str) -> list[BenchRow]:
        return [r for r in self.rows if r.preset == preset]

    def instances(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.instance not in seen:
                seen.append(r.instance)
        return seen

    def median_time(self, preset: str) -> float:
        return statistics.median(r.solve_ms for r in self.by_preset(preset))

    def median_bound_pct(self, preset: str) -> float:
        return statistics.median(r.bound_pct for r in self.by_preset(preset))

    def time_ratio(self, preset: str) -> Optional[float]:
        if BASELINE not in self.presets:
            return None
        return self.median_time(preset) / self.median_time(BASELINE)

    def disagreements(self) -> list[str]:
        """Instances where completed presets report different optimal costs."""
        out = []
        for name in self.instances():
            costs = {r.cost for r in self.rows if r.instance == name and not r.aborted}
            if len(costs) > 1:
                out.append(name)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            cfg = PRESETS[r.preset]
            w.writerow([
                r.instance, r.preset, cfg.strategy, cfg.key, cfg.test_name,
                r.iterations, r.discarded_dom, r.discarded_low, r.od_paths,
                f"{r.solve_ms:.2f}", f"{r.bound_pct:.1f}",
                "" if r.ratio is None else f"{r.ratio:.2f}",
                _fmt_cost(r.cost), int(r.aborted),
            ])
        for label, agg in (("sum", sum), ("mean", statistics.fmean)):
            for p in self.presets:
                rows = self.by_preset(p)
                cfg = PRESETS[p]
                ratio = self.time_ratio(p)
                w.writerow([
                    f"ALL ({label})", p, cfg.strategy, cfg.key, cfg.test_name,
                    *(_fmt_num(agg([getattr(r, a) for r in rows]))
                      for a in ("iterations", "discarded_dom", "discarded_low", "od_paths")),
                    f"{self.median_time(p):.2f}", f"{self.median_bound_pct(p):.1f}",
                    "" if ratio is None else f"{ratio:.2f}", "", sum(r.aborted for r in rows),
                ])
        return buf.getvalue()

    def to_table(self) -> str:
        """Human-readable summary laid out with one column per preset."""
        n = len(self.instances())
        header = ["", *self.presets]
        lines = [
            ["type", *(PRESETS[p].strategy for p in self.presets)],
            ["key", *(PRESETS[p].key for p in self.presets)],
            ["test", *(PRESETS[p].test_name for p in self.presets)],
        ]
        for title, attr in (("iterations", "iterations"), ("discarded Dom", "discarded_dom"),
                            ("discarded Low", "discarded_low"), ("# od paths", "od_paths")):
            lines.append([f"{title} (mean)", *(f"{statistics.fmean(getattr(r, attr) for r in self.by_preset(p)):.0f}"
                                                for p in self.presets)])
            lines.append([f"{title} (sum)", *(str(sum(getattr(r, attr) for r in self.by_preset(p)))
                                               for p in self.presets)])
        lines.append(["solving time (ms)", *(f"{self.median_time(p):.2f}" for p in self.presets)])
        lines.append(["bound computation (%)", *(f"{self.median_bound_pct(p):.1f}" for p in self.presets)])
        ratios = [self.time_ratio(p) for p in self.presets]
        lines.append(["solving time ratio", *("n/a" if x is None else f"{x:.2f}x" for x in ratios)])
        aborted = [sum(r.aborted for r in self.by_preset(p)) for p in self.presets]
        if any(aborted):
            lines.append(["aborted runs (time is a lower bound)", *map(str, aborted)])
        widths = [max(len(str(row[i])) for row in [header, *lines]) for i in range(len(header))]
        fmt = lambda row: "  ".join(str(c).rjust(w) if i else str(c).ljust(w) for i, (c, w) in enumerate(zip(row, widths)))
        out = [f"{n} instance(s); times are medians over instances of per-instance medians", fmt(header),
               "-" * (sum(widths) + 2 * (len(widths) - 1))]
        out += [fmt(row) for row in lines]
        return "\n".join(out) + "\n"


def _fmt_cost(c: float) -> str:
    if math.isinf(c):
        return "+inf" if c > 0 else "-inf"
    return f"{c:.10g}"


def _fmt_num(x) -> str:
    return str(x) if isinstance(x, int) else f"{x:.1f}"


def bench_instance(
    name: str,
    inst: Instance,
    presets: Sequence[str],
    repeats: int = 5,
    max_iterations: Optional[int] = None,
    backend: str = "auto",
) -> list[BenchRow]:
    g = build_digraph(inst).digraph
    rows = []
    for p in presets:
        cfg = PRESETS[p]
        times, bound_times = [], []
        res: SolveResult = None
        for _ in range(repeats):
            res = run(g, inst.limits, cfg, max_iterations=max_iterations, backend=backend)
            times.append(res.stats.solve_time)
            bound_times.append(res.stats.bound_time)
        s = res.stats
        rows.append(BenchRow(name, p, s.iterations, s.discarded_dom, s.discarded_low, s.od_paths,
                             1e3 * statistics.median(times), 1e3 * statistics.median(bound_times),
                             res.cost, s.aborted))
    base = next((r for r in rows if r.preset == BASELINE), None)
    for r in rows:
        if base is not None and base.solve_ms > 0:
            r.ratio = r.solve_ms / base.solve_ms
    return rows


def run_bench(
    corpus: Iterable[tuple[str, Instance]],
    presets: Sequence[str] = tuple(PRESETS),
    repeats: int = 5,
    max_iterations: Optional[int] = None,
    backend: str = "auto",
    progress=None,
) -> BenchReport:
    unknown = [p for p in presets if p not in PRESETS]
    if unknown:
        raise ValueError(f"unknown presets: {unknown}")
    report = BenchReport(list(presets))
    for name, inst in corpus:
        report.rows += bench_instance(name, inst, presets, repeats, max_iterations, backend)
        if progress is not None:
            progress(name)
    if not report.rows:
        raise ValueError("empty corpus")
    return report
