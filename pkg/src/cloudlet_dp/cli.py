"""Command-line entry point: ``cloudlet-dp {solve,oracle,simulate,compare}``.

Exit codes: 0 success, 1 domain error (infeasible, invalid input, oversized
oracle instance), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import dp_solver, oracle, sim
from .errors import CloudletDPError, NoFeasibleRoute
from .scenario_io import (
    POLICIES,
    bundled_path,
    format_allotments,
    load_problem,
    load_scenario,
    write_report,
)

log = logging.getLogger("cloudlet_dp")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

COMPARISON_NOTE = (
    "DEMCCM vs direct-to-cloud: seeded A/B simulation under this model. "
    "The outcome is a property of the simulated model, not a reproduction of published measurements."
)


class UsageError(Exception):
    pass


def _existing(path: str) -> Path:
    p = Path(path)
    if p.is_file():
        return p
    if bundled_path(p.name).is_file() and not p.parent.parts:
        return bundled_path(p.name)
    raise UsageError(f"cannot read {path!r}")


def solution_line(sol: dp_solver.RouteSolution) -> str:
    return (f"energy={sol.achieved.energy!r} perf={sol.achieved.perf!r} "
            f"time_used={sol.time_used} assignment={format_allotments(sol.allotments)}")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _route_cmd(args, solve_fn, frontier_fn) -> int:
    problem = load_problem(_existing(args.problem))
    problem = problem.with_constraints(args.time, args.confidence)
    fmt = "json" if args.format == "json" else "csv"
    if args.full_frontier:
        rows = frontier_fn(problem)
        _emit(write_report(rows, fmt), args.out)
        if args.plot:
            from .plotting import plot_frontier
            plot_frontier(rows, args.plot)
        if args.out:
            print(f"{len(rows)} frontier points over t=1..{problem.time_constraint} -> {args.out}")
        return EXIT_OK
    try:
        sol = solve_fn(problem)
    except NoFeasibleRoute as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        if exc.best is not None:
            b = exc.best
            print(f"best: perf={b.perf!r} energy={b.energy!r} "
                  f"assignment={format_allotments(b.allotments)}", file=sys.stderr)
        return EXIT_DOMAIN
    print(solution_line(sol))
    if args.out:
        Path(args.out).write_text(write_report(sol, fmt), encoding="utf-8")
    return EXIT_OK


def cmd_solve(args) -> int:
    return _route_cmd(args, dp_solver.solve, dp_solver.full_frontier)


def cmd_oracle(args) -> int:
    return _route_cmd(args, oracle.oracle_solve, oracle.oracle_frontier)


def _summary_text(metrics: sim.SimMetrics) -> str:
    s = metrics.summary()
    return " ".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in s.items())


def cmd_simulate(args) -> int:
    scenario = load_scenario(_existing(args.scenario))
    metrics, trace = sim.run(scenario, args.seed, policy=args.policy)
    print(_summary_text(metrics))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "run.trace").write_text(sim.trace_to_text(trace), encoding="utf-8")
        (out / "metrics.csv").write_text(write_report(metrics, "csv"), encoding="utf-8")
        (out / "metrics.jsonl").write_text(write_report(metrics, "json"), encoding="utf-8")
        (out / "summary.json").write_text(json.dumps(metrics.summary(), indent=2) + "\n", encoding="utf-8")
        if args.plot:
            from .plotting import plot_energy_breakdown
            plot_energy_breakdown(trace, out / "energy_by_state.png")
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario = load_scenario(_existing(args.scenario))
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = range(args.base_seed, args.base_seed + args.seeds)
    metrics = sim.compare(scenario, seeds)
    table = sim.comparison_table(metrics)
    means = {r["policy"]: r for r in table[1] if r["seed"] == "mean"}
    verdict = ("demccm mean device energy <= direct"
               if means["demccm"]["total_energy"] <= means["direct"]["total_energy"]
               else "demccm mean device energy > direct")
    lines = [COMPARISON_NOTE]
    for policy in ("demccm", "direct"):
        m = means[policy]
        lines.append(f"{policy}: mean_total_energy={m['total_energy']!r} "
                     f"mean_latency_p50={m['latency_p50']!r} mean_latency_p95={m['latency_p95']!r}")
    lines.append(f"result ({len(seeds)} seeds): {verdict}")
    summary = "\n".join(lines) + "\n"
    sys.stdout.write(summary)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text(write_report(table, "csv"), encoding="utf-8")
    (out / "comparison.jsonl").write_text(write_report(table, "json"), encoding="utf-8")
    (out / "summary.txt").write_text(summary, encoding="utf-8")
    if not args.no_plot:
        from .plotting import plot_comparison
        plot_comparison(metrics, out / "comparison.png")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cloudlet-dp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("solve", cmd_solve, "minimum-energy route via the dynamic program"),
                            ("oracle", cmd_oracle, "same answer by exhaustive enumeration")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--problem", required=True, help=".problem file")
        p.add_argument("--time", type=int, help="time constraint (default: from the file)")
        p.add_argument("--confidence", type=float, help="performance threshold (default: from the file)")
        p.add_argument("--full-frontier", action="store_true", help="emit the frontier for every t <= T")
        p.add_argument("--out", help="write the report here")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--plot", help="with --full-frontier, also render the frontier to this image")
        p.set_defaults(func=fn)

    p = sub.add_parser("simulate", help="run one seeded simulation")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--policy", choices=POLICIES, help="override the scenario's policy")
    p.add_argument("--out", help="directory for trace and metrics files")
    p.add_argument("--plot", action="store_true", help="also render energy_by_state.png")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="both policies over a range of seeds")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("CLOUDLET_DP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CloudletDPError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
