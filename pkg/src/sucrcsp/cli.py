"""Command-line interface.

Exit codes: 0 success, 1 infeasible instance (``solve``), 2 input or usage
error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import engine
from .bench import run_bench
from .engine import PRESETS, run
from .generator import GeneratorParams, generate_corpus
from .instance_io import InstanceFormatError, read_instance, write_instance, write_plan
from .model import InstanceError, build_digraph, path_to_plan
from .viz import render_svg

log = logging.getLogger("sucrcsp")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path):
    try:
        inst = read_instance(path)
        teg = build_digraph(inst)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except (OSError, InstanceFormatError, InstanceError) as e:
        raise InputError(str(e)) from None
    return inst, teg


def _fmt_cost(c: float) -> str:
    if math.isinf(c):
        return "+inf"
    return f"{c:.10g}"


def cmd_solve(args) -> int:
    inst, teg = _load(args.instance)
    cfg = PRESETS[args.algo]
    res = run(teg.digraph, inst.limits, cfg, backend=args.backend)
    print(f"instance: {args.instance}")
    print(f"algorithm: {args.algo} ({cfg.strategy}, key {cfg.key}, test {cfg.test_name})")
    print(f"status: {'optimal' if res.feasible else 'infeasible'}")
    print(f"cost: {_fmt_cost(res.cost)}")
    if args.stats:
        s = res.stats
        print(f"iterations: {s.iterations}")
        print(f"discarded Dom: {s.discarded_dom}")
        print(f"discarded Low: {s.discarded_low}")
        print(f"# od paths: {s.od_paths}")
        print(f"solving time (ms): {1e3 * s.solve_time:.2f}")
        print(f"bound computation (ms): {1e3 * s.bound_time:.2f}")
    if res.feasible and args.plan_out:
        write_plan(path_to_plan(res.path, teg), args.plan_out, res.cost)
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_bench(args) -> int:
    presets = [p.strip() for p in args.presets.split(",") if p.strip()]
    unknown = [p for p in presets if p not in PRESETS]
    if unknown:
        raise InputError(f"unknown presets: {', '.join(unknown)}")
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise InputError(f"{corpus_dir}: not a directory")

    def corpus():
        for path in sorted(corpus_dir.glob("*.json")):
            try:
                yield path.name, read_instance(path)
            except (OSError, InstanceFormatError) as e:
                log.warning("skipping %s: %s", path, e)

    try:
        report = run_bench(corpus(), presets, repeats=args.repeats, max_iterations=args.max_iterations,
                           backend=args.backend, progress=lambda n: log.info("done %s", n))
    except ValueError as e:
        raise InputError(f"{corpus_dir}: {e}") from None
    except InstanceError as e:
        raise InputError(str(e)) from None
    if args.out:
        Path(args.out).write_text(report.to_csv(), encoding="utf-8")
    print(report.to_table(), end="")
    bad = report.disagreements()
    if bad:
        log.error("presets disagree on the optimal cost for: %s", ", ".join(bad))
        return EXIT_INFEASIBLE
    return EXIT_OK


def _params_from_args(args) -> GeneratorParams:
    if args.params:
        try:
            params = GeneratorParams.from_dict(json.loads(Path(args.params).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as e:
            raise InputError(f"{args.params}: {e}") from None
    else:
        params = GeneratorParams()
    overrides = {k: getattr(args, k) for k in ("horizon", "n_layers", "levels_per_layer")
                 if getattr(args, k) is not None}
    try:
        return replace(params, **overrides)
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_generate(args) -> int:
    params = _params_from_args(args)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        width = max(3, len(str(args.count - 1)))
        for i, inst in enumerate(generate_corpus(params, args.count, args.seed)):
            write_instance(inst, out / f"instance_{i:0{width}d}.json")
    except OSError as e:
        raise InputError(f"{out}: {e}") from None
    print(f"wrote {args.count} instance(s) to {out}")
    return EXIT_OK


def cmd_viz(args) -> int:
    inst, teg = _load(args.instance)
    res = run(teg.digraph, inst.limits, PRESETS[args.algo], trace=True, backend=args.backend)
    title = args.title or f"{args.algo}: {len(set(res.explored_arcs))} arcs explored, cost {_fmt_cost(res.cost)}"
    svg = render_svg(teg, res.explored_arcs, res.path, title=title)
    try:
        Path(args.out).write_text(svg, encoding="utf-8")
    except OSError as e:
        raise InputError(f"{args.out}: {e}") from None
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sucrcsp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--backend", choices=("auto", "python", "compiled"), default="auto")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", choices=list(PRESETS), default="v3")
    s.add_argument("--stats", action="store_true")
    s.add_argument("--plan-out")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="compare presets on a corpus of instances")
    b.add_argument("--corpus", required=True, help="directory of instance JSON files")
    b.add_argument("--presets", default=",".join(PRESETS))
    b.add_argument("--out", help="CSV output file")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--max-iterations", type=int, default=None,
                   help="stop runs after this many extensions; their times become lower bounds")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("generate", help="write a seeded synthetic corpus")
    g.add_argument("--params", help="JSON file of generator parameters")
    g.add_argument("--horizon", type=int)
    g.add_argument("--n-layers", dest="n_layers", type=int)
    g.add_argument("--levels-per-layer", type=int)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("viz", help="draw the explored search space as SVG")
    v.add_argument("--instance", required=True)
    v.add_argument("--algo", choices=list(PRESETS), default="v3")
    v.add_argument("--out", required=True)
    v.add_argument("--title")
    v.set_defaults(func=cmd_viz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.backend == "compiled" and not engine.HAVE_KERNEL:
        print("error: compiled kernel not available", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
