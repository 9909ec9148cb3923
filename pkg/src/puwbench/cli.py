"""puwbench command line: simulate, probe, bench-task, report.

Exit codes: 0 ok, 2 bad configuration, 3 supply stall, 4 missing trace or
report, 5 not enough data for a probe.
"""

from __future__ import annotations

import argparse
import ast
import os
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .base import TaskClass
from .bench import bench_csv, bench_task
from .errors import InsufficientData, ScenarioError, UnknownClass
from .probes.registry import PROBES, get_probe
from .probes.report import flatten, read_reports_csv, summary_table, write_reports
from .sim.engine import run_scenario
from .sim.scenario import Mode, load_scenario
from .sim.trace import EventTrace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STALL = 3
EXIT_MISSING = 4
EXIT_DATA = 5


@dataclass
class RunManifest:
    scenarios: list = field(default_factory=list)
    probes: list = field(default_factory=list)
    out: Path = Path("out")
    seed: int | None = None
    mode: Mode | None = None
    traces: list = field(default_factory=list)
    task_class: str = "cryptopuzzle"
    params: dict = field(default_factory=dict)


def worker_count() -> int:
    raw = os.environ.get("PUWBENCH_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(4, os.cpu_count() or 1)


def versions() -> dict:
    return {"puwbench": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), ast.literal_eval(value.strip())
    except (ValueError, SyntaxError):
        return key.strip(), value.strip()


def _err(msg: str) -> None:
    print(f"puwbench: {msg}", file=sys.stderr)


def _simulate_one(path: Path, out: Path, seed, mode) -> int:
    scenario = load_scenario(path)
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if mode is not None:
        changes["mode"] = mode
    if changes:
        scenario = scenario.with_(**changes)
    trace = run_scenario(scenario)
    trace.write(out, extra_meta={"versions": versions(), "scenario": path.name})
    if trace.stalled:
        _err(f"{path}: supply stalled at t={trace.of('SupplyStall')[0].t:g}")
        return EXIT_STALL
    return EXIT_OK


def cmd_simulate(m: RunManifest) -> int:
    if not m.scenarios:
        _err("simulate needs --scenario")
        return EXIT_CONFIG
    paths = [Path(p) for p in m.scenarios]
    for p in paths:
        # parse everything up front so a bad file fails before any run starts
        try:
            load_scenario(p)
        except ScenarioError as exc:
            _err(f"{p}: {exc}")
            return EXIT_CONFIG
        except (OSError, ValueError) as exc:
            _err(f"{p}: {exc}")
            return EXIT_CONFIG
    outs = [m.out] if len(paths) == 1 else [m.out / p.stem for p in paths]
    if len(paths) == 1:
        codes = [_simulate_one(paths[0], outs[0], m.seed, m.mode)]
    else:
        with ThreadPoolExecutor(worker_count()) as pool:
            codes = list(pool.map(lambda a: _simulate_one(a[0], a[1], m.seed, m.mode), zip(paths, outs)))
    return max(codes)


def _run_probe(name: str, m: RunManifest, trace):
    entry = get_probe(name)
    kwargs = dict(m.params)
    if entry.needs_trace:
        return entry.fn(trace, **kwargs)
    if entry.takes_backend:
        kwargs.setdefault("backend", m.task_class)
    kwargs.setdefault("seed", 0 if m.seed is None else m.seed)
    return entry.fn(**kwargs)


def cmd_probe(m: RunManifest) -> int:
    if not m.probes:
        _err("probe needs --probes")
        return EXIT_CONFIG
    unknown = [p for p in m.probes if p not in PROBES]
    if unknown:
        _err(f"unknown probe id(s): {', '.join(unknown)}; known: {', '.join(sorted(PROBES))}")
        return EXIT_CONFIG
    try:
        TaskClass.parse(m.task_class)
    except UnknownClass as exc:
        _err(str(exc))
        return EXIT_CONFIG
    trace = None
    if any(PROBES[p].needs_trace for p in m.probes):
        if not m.traces:
            _err("trace probes need --trace")
            return EXIT_MISSING
        path = Path(m.traces[0])
        csv_path = path / "trace.csv" if path.is_dir() else path
        if not csv_path.exists():
            _err(f"trace not found: {csv_path}")
            return EXIT_MISSING
        trace = EventTrace.read(csv_path)
    try:
        with ThreadPoolExecutor(worker_count()) as pool:
            results = list(pool.map(lambda p: _run_probe(p, m, trace), m.probes))
    except InsufficientData as exc:
        _err(f"insufficient data: {exc}")
        return EXIT_DATA
    except TypeError as exc:
        _err(f"bad --param for probe: {exc}")
        return EXIT_CONFIG
    reports = flatten(results)
    write_reports(reports, m.out)
    sys.stdout.write(summary_table(reports))
    return EXIT_OK


def cmd_bench_task(m: RunManifest, trials: int) -> int:
    try:
        rows = bench_task(m.task_class, trials, 0 if m.seed is None else m.seed, **m.params)
    except (ValueError, UnknownClass, KeyError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    text = bench_csv(rows)
    m.out.mkdir(parents=True, exist_ok=True)
    (m.out / "bench.csv").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_report(m: RunManifest) -> int:
    out = m.out
    summary, report = out / "summary.txt", out / "report.csv"
    if summary.exists():
        sys.stdout.write(summary.read_text())
        return EXIT_OK
    if report.exists():
        sys.stdout.write(summary_table(read_reports_csv(report.read_text())))
        return EXIT_OK
    _err(f"no report in {out}")
    return EXIT_MISSING


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override the scenario / probe seed")
    common.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    common.add_argument("--scenario", action="append", default=[], help="scenario file (repeatable)")
    common.add_argument("--probes", default="", help="comma-separated probe ids")
    common.add_argument("--class", dest="task_class", default="cryptopuzzle", help="cryptopuzzle | kov | tsp")
    common.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE",
                        help="extra keyword for probes or bench sizes (repeatable)")

    parser = argparse.ArgumentParser(prog="puwbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run scenarios, write trace.csv and run.json")
    p = sub.add_parser("probe", parents=[common], help="run probes, write report.csv and summary.txt")
    p.add_argument("--trace", action="append", default=[], help="trace.csv or a run directory")
    b = sub.add_parser("bench-task", parents=[common], help="op and wall-clock quantiles per phase")
    b.add_argument("--trials", type=int, default=100)
    sub.add_parser("report", parents=[common], help="print the summary of a probe run")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    m = RunManifest(
        scenarios=args.scenario,
        probes=[p.strip() for p in args.probes.split(",") if p.strip()],
        out=args.out,
        seed=args.seed,
        mode=Mode(args.mode) if args.mode else None,
        traces=getattr(args, "trace", []),
        task_class=args.task_class,
        params=dict(args.param),
    )
    if args.command == "simulate":
        return cmd_simulate(m)
    if args.command == "probe":
        return cmd_probe(m)
    if args.command == "bench-task":
        if args.trials < 1:
            _err("--trials must be >= 1")
            return EXIT_CONFIG
        return cmd_bench_task(m, args.trials)
    return cmd_report(m)


if __name__ == "__main__":
    sys.exit(main())
