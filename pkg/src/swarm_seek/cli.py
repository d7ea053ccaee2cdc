"""``swarm-seek`` command line: run scenarios, validation suites and figure data.

Exit codes: 0 success, 1 validation failure, 2 scenario or usage error,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import engine, figures, scenario, validation
from .errors import DivergenceError, ScenarioError

EXIT_OK, EXIT_FAIL, EXIT_SCENARIO, EXIT_DIVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_SCENARIO)


def _resolve(path: str):
    """A file path, or the name of a bundled preset."""
    from pathlib import Path

    if Path(path).exists():
        return path
    try:
        return scenario.preset_path(path)
    except ScenarioError:
        return path


def cmd_run(args) -> int:
    try:
        s = scenario.load(_resolve(args.path), seed=args.seed)
        t0 = time.perf_counter()
        tr = engine.run(s, decimate=args.decimate)
        paths = engine.write_outputs(tr, args.out)
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    m = engine.metrics(tr)
    print(f"{s.name}: {len(tr)} records in {time.perf_counter() - t0:.2f}s, "
          f"final distance {m['final_distance']:.4g} (ball {m['epsilon_ball']:.4g}), entry {m['entry_time']}")
    for p in paths.values():
        print(f"  wrote {p}")
    return EXIT_OK


def cmd_validate(args) -> int:
    names = list(validation.SUITES) if args.suite == "all" else [args.suite]
    if any(n not in validation.SUITES for n in names):
        print(f"unknown suite {args.suite!r}; choose from all, {', '.join(validation.SUITES)}", file=sys.stderr)
        return EXIT_SCENARIO
    results = validation.run_suites(names)
    ok = True
    for name, checks in results.items():
        for c in checks:
            print(c.line(name))
        passed = all(c.passed for c in checks)
        ok &= passed
        print(f"suite {name}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_figures(args) -> int:
    if args.name not in figures.FIGURES:
        print(f"unknown figure {args.name!r}; choose from {', '.join(figures.FIGURES)}", file=sys.stderr)
        return EXIT_SCENARIO
    for p in figures.emit(args.name, args.out):
        print(f"wrote {p}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="swarm-seek", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate a scenario file (or bundled preset name)")
    r.add_argument("path")
    r.add_argument("--out", default="out", help="output directory (default: out)")
    r.add_argument("--decimate", type=int, default=1, help="record every k-th step")
    r.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="run property suites")
    v.add_argument("--suite", default="all", help="suite name or 'all'")
    v.set_defaults(func=cmd_validate)

    f = sub.add_parser("figures", help="emit plot-ready CSV data for a named figure")
    f.add_argument("name", help=", ".join(figures.FIGURES))
    f.add_argument("--out", default="figures", help="output directory (default: figures)")
    f.set_defaults(func=cmd_figures)

    sub.add_parser("presets", help="list bundled scenarios").set_defaults(
        func=lambda a: print("\n".join(scenario.preset_names())) or EXIT_OK
    )
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
