"""Command-line front end.

Subcommands:
  solve        plan one (token length, strategy) cell and print the schedule
  sweep        run the configured token-length sweep, write a CSV
  gantt        render one cell as an SVG or ASCII Gantt chart
  verify       solver-vs-oracle check on randomized small instances
  dump-config  write a normalized config (from a preset or an existing file)

Exit codes: 0 ok, 1 usage, 2 config error, 3 infeasible, 4 verification
failure.  COLDPIPE_THREADS caps sweep parallelism (default 1).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import baselines, config, cost_tables, experiment
from .errors import ConfigError, InfeasibleError, PlanError
from .gantt import render_ascii, render_svg
from .model_profile import build_profiles
from .timeline import Timeline, bubble_report

CSV_COLUMNS = ("token_length", "strategy", "makespan_s", "load_s_total",
               "comm_s_total", "comp_s_total", "wait_s_total", "improvement_pct")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    config problems, so remap usage errors to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message) from None


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def _fmt(value: float) -> str:
    return format(value, ".9g")


def _thread_cap() -> int:
    raw = os.environ.get("COLDPIPE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"COLDPIPE_THREADS must be an integer, got {raw!r}")


def _build_tables(scenario, tokens: int) -> cost_tables.CostTables:
    profiles = build_profiles(scenario.model, tokens)
    return cost_tables.build(profiles, list(scenario.devices), tokens)


def _device_label(scenario, index: int) -> str:
    return f"Device {scenario.devices[index].id}"


def _print_memory_diagnostic(scenario, tables) -> None:
    print("per-device memory headroom:", file=sys.stderr)
    for d, dev in enumerate(scenario.devices):
        hostable = tables.max_hostable_layers(d)
        print(f"  Device {dev.id}: {dev.memory_bytes / 1e9:.2f} GB holds at "
              f"most {hostable} of {tables.num_layers} layers", file=sys.stderr)


def _print_timeline(scenario, timeline: Timeline) -> None:
    header = (f"{'stage':>5}  {'device':>8}  {'layers':>9}  {'load_s':>10}  "
              f"{'comm_s':>10}  {'comp_s':>10}  {'start_s':>10}  "
              f"{'finish_s':>10}  {'wait_s':>10}")
    print(header)
    for n, s in enumerate(timeline.stages, start=1):
        layers = f"{s.start_layer}-{s.end_layer}"
        print(f"{n:>5}  {_device_label(scenario, s.device):>8}  {layers:>9}  "
              f"{s.load_s:>10.6f}  {s.comm_s:>10.6f}  {s.comp_s:>10.6f}  "
              f"{s.start_s:>10.6f}  {s.finish_s:>10.6f}  {s.wait_s:>10.6f}")
    print(f"makespan: {timeline.makespan_s:.6f} s")
    report = bubble_report(timeline)
    waits = "  ".join(f"{w:.6f}" for w in report.stage_waits)
    print(f"obstructive wait total: {report.total_wait_s:.6f} s  (per stage: {waits})")


def _solve_cell(scenario, tokens: int, strategy: str):
    tables = _build_tables(scenario, tokens)
    timeline = experiment.run_cell(scenario, strategy, tables)
    return tables, timeline


def cmd_solve(args) -> int:
    scenario = config.load_scenario(args.config)
    try:
        tables, timeline = _solve_cell(scenario, args.tokens, args.strategy)
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        _print_memory_diagnostic(scenario, _build_tables(scenario, args.tokens))
        return EXIT_INFEASIBLE
    print(f"token length {args.tokens}, strategy {args.strategy}")
    _print_timeline(scenario, timeline)
    if args.out:
        payload = {
            "token_length": args.tokens,
            "strategy": args.strategy,
            "makespan_s": timeline.makespan_s,
            "plan": [
                {"device_id": scenario.devices[s.device].id,
                 "start_layer": s.start_layer, "end_layer": s.end_layer}
                for s in timeline.stages
            ],
            "timeline": timeline.to_dict(),
        }
        _atomic_write(Path(args.out), json.dumps(payload, indent=2) + "\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        improvement = "" if row.improvement_pct is None else _fmt(row.improvement_pct)
        writer.writerow([
            row.token_length, row.strategy, _fmt(row.makespan_s),
            _fmt(row.load_s_total), _fmt(row.comm_s_total),
            _fmt(row.comp_s_total), _fmt(row.wait_s_total), improvement,
        ])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    scenario = config.load_scenario(args.config)
    try:
        rows = experiment.run_sweep(scenario, max_workers=_thread_cap())
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = Path(args.out)
    _atomic_write(out, rows_to_csv(rows))
    print(f"wrote {out} ({len(rows)} rows)")
    dp_rows = [r for r in rows if r.strategy == "optimal_dp"
               and r.improvement_pct is not None]
    if dp_rows:
        for r in dp_rows:
            print(f"  t={r.token_length:>6}: optimal {r.makespan_s:.4f} s, "
                  f"improvement over best baseline {r.improvement_pct:.2f}%")
        avg = experiment.average_improvement_pct(rows)
        print(f"average improvement over per-token best baseline: {avg:.2f}%")
    return EXIT_OK


def cmd_gantt(args) -> int:
    scenario = config.load_scenario(args.config)
    try:
        _, timeline = _solve_cell(scenario, args.tokens, args.strategy)
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    labels = [f"Device {dev.id}" for dev in scenario.devices]
    title = f"{args.strategy} @ {args.tokens} tokens"
    if args.format == "svg":
        rendered = render_svg(timeline, labels, title=title)
    else:
        rendered = render_ascii(timeline, labels, title=title)
    if args.out:
        _atomic_write(Path(args.out), rendered)
        print(f"wrote {args.out}")
    else:
        print(rendered, end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    instances = experiment.random_instance_suite(args.count, seed=args.seed)
    outcomes = experiment.verify_suite(instances)
    failures = 0
    for o in outcomes:
        status = "ok" if o.ok else "MISMATCH"
        print(f"instance {o.index:03d}: {status} ({o.detail})")
        failures += 0 if o.ok else 1
    print(f"{len(outcomes) - failures}/{len(outcomes)} instances passed")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def cmd_dump_config(args) -> int:
    if args.preset:
        scenario = config.CONFIG_PRESETS[args.preset]()
    else:
        scenario = config.load_scenario(args.config)
    text = config.dump_scenario(scenario)
    if args.out:
        _atomic_write(Path(args.out), text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="coldpipe",
                     description="Cold-start-aware pipeline scheduling for "
                                 "LLM inference on heterogeneous edge devices.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="plan one cell and print the schedule")
    solve.add_argument("--config", required=True)
    solve.add_argument("--tokens", type=int, required=True)
    solve.add_argument("--strategy", default="optimal_dp",
                       choices=baselines.STRATEGIES)
    solve.add_argument("--out", help="also write plan + timeline as JSON")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="run the configured sweep, write CSV")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", default="sweep.csv")
    sweep.set_defaults(func=cmd_sweep)

    gantt = sub.add_parser("gantt", help="render one cell as a Gantt chart")
    gantt.add_argument("--config", required=True)
    gantt.add_argument("--tokens", type=int, required=True)
    gantt.add_argument("--strategy", default="optimal_dp",
                       choices=baselines.STRATEGIES)
    gantt.add_argument("--format", default="svg", choices=("svg", "ascii"))
    gantt.add_argument("--out", help="output file (default: stdout for ascii)")
    gantt.set_defaults(func=cmd_gantt)

    verify = sub.add_parser("verify",
                            help="check the solver against the brute-force oracle")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--count", type=int, default=100)
    verify.set_defaults(func=cmd_verify)

    dump = sub.add_parser("dump-config", help="write a normalized config")
    source = dump.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=sorted(config.CONFIG_PRESETS))
    source.add_argument("--config")
    dump.add_argument("--out")
    dump.set_defaults(func=cmd_dump_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        if isinstance(err.code, str):
            print(err.code, file=sys.stderr)
            return EXIT_USAGE
        return EXIT_USAGE if err.code else EXIT_OK
    if getattr(args, "tokens", 1) < 1:
        print("error: --tokens must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "count", 1) < 1:
        print("error: --count must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError, PlanError) as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
