#!/usr/bin/env python3
"""Time the compiled kernel against the pure-Python fallback.

Both backends run the same presets on the same seeded corpus; the script
checks that their counters and optimal costs match before printing times.

    python benchmarks/compare_backends.py --horizon 48 --count 5
"""
from __future__ import annotations

import argparse
import statistics
import sys
import time

from sucrcsp import engine
from sucrcsp.engine import PRESETS, compute_bounds, run
from sucrcsp.generator import GeneratorParams, generate_corpus
from sucrcsp.model import build_digraph


def _median_time(fn, repeats):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--horizon", type=int, default=48)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--presets", default="v0,v1,v3,test-only")
    p.add_argument("--max-iterations", type=int, default=200_000,
                   help="cap per run so the Python backend finishes")
    args = p.parse_args(argv)
    if not engine.HAVE_KERNEL:
        print("compiled kernel not built; reinstall with Cython available", file=sys.stderr)
        return 2

    presets = [x for x in args.presets.split(",") if x]
    corpus = generate_corpus(GeneratorParams(horizon=args.horizon), args.count, args.seed)
    graphs = [(inst, build_digraph(inst).digraph) for inst in corpus]
    rows = []

    py_t, c_t = [], []
    for _, g in graphs:
        tp, bp = _median_time(lambda: compute_bounds(g, "python"), args.repeats)
        tc, bc = _median_time(lambda: compute_bounds(g, "compiled"), args.repeats)
        if bp != bc:
            print("bound tables differ between backends", file=sys.stderr)
            return 1
        py_t.append(tp)
        c_t.append(tc)
    rows.append(("bounds", statistics.median(py_t), statistics.median(c_t), ""))

    for name in presets:
        py_t, c_t, aborted = [], [], 0
        for inst, g in graphs:
            solve = lambda b: run(g, inst.limits, PRESETS[name], max_iterations=args.max_iterations, backend=b)
            tp, rp = _median_time(lambda: solve("python"), args.repeats)
            tc, rc = _median_time(lambda: solve("compiled"), args.repeats)
            if rp.stats.counters() != rc.stats.counters() or rp.cost != rc.cost:
                print(f"{name}: backends disagree ({rp.stats.counters()} vs {rc.stats.counters()})",
                      file=sys.stderr)
                return 1
            aborted += rc.stats.aborted
            py_t.append(tp)
            c_t.append(tc)
        rows.append((name, statistics.median(py_t), statistics.median(c_t), f"{aborted} capped" if aborted else ""))

    print(f"{len(graphs)} instance(s), T={args.horizon}; median wall-clock per instance")
    print(f"{'kernel':<10} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}")
    for name, tp, tc, note in rows:
        print(f"{name:<10} {1e3 * tp:12.2f} {1e3 * tc:14.3f} {tp / tc:8.0f}x  {note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
