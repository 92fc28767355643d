"""Acceptance criteria 1-9.

Each criterion is a plain function returning ``(passed, detail)``; the pytest
wrappers assert on it and the terminal summary prints one PASS/FAIL line per
criterion. Run ``python3 tests/test_acceptance.py`` to get the same lines
without pytest.
"""

import itertools
import json
import random
import sys
import tempfile
import time
from pathlib import Path

import pytest
import yaml

sys.path.insert(0, str(Path(__file__).parent))

from conftest import DATA, random_problem  # noqa: E402

from cloudlet_dp.cli import main as cli_main  # noqa: E402
from cloudlet_dp.dp_solver import full_frontier, solve  # noqa: E402
from cloudlet_dp.errors import NoFeasibleRoute  # noqa: E402
from cloudlet_dp.oracle import exact_probability, oracle_solve, split_perf_by_assignment  # noqa: E402
from cloudlet_dp.route_model import IDENTITY, PerfEnergy, combine, dominates, prune  # noqa: E402
from cloudlet_dp.scenario_io import (  # noqa: E402
    bundled_path,
    format_allotments,
    load_problem,
    load_scenario,
    serialize_problem,
    write_report,
)
from cloudlet_dp.sim import Simulation, replay, run  # noqa: E402

RESULTS: dict[int, str] = {}
SCENARIOS = ["unstable.scenario", "static.scenario", "mobile.scenario"]
N_INSTANCES = 1000
THETAS = (0.5, 0.7, 0.9)


def record(n, title, ok, detail):
    RESULTS[n] = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    print(RESULTS[n])
    return ok, detail


def instances(n=N_INSTANCES, seed=20240501):
    rng = random.Random(seed)
    return [random_problem(rng, max_nodes=5, max_methods=3, max_options=4, max_T=12, thetas=THETAS)
            for _ in range(n)]


def outcome(fn, problem):
    try:
        sol = fn(problem)
    except NoFeasibleRoute:
        return None
    return sol


def best_effort(fn, problem):
    try:
        fn(problem)
    except NoFeasibleRoute as exc:
        return exc.best


def criterion_1():
    start = time.perf_counter()
    bad = []
    feasible = 0
    for k, p in enumerate(instances()):
        a, b = outcome(solve, p), outcome(oracle_solve, p)
        if (a is None) != (b is None):
            bad.append((k, "feasibility"))
            continue
        if a is None:
            if best_effort(solve, p) != best_effort(oracle_solve, p):
                bad.append((k, "best-effort diagnostics"))
            continue
        feasible += 1
        if a.achieved.energy != b.achieved.energy or abs(a.achieved.perf - b.achieved.perf) > 1e-12:
            bad.append((k, a.achieved, b.achieved))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60
    return record(1, "oracle equivalence", ok,
                  f"{N_INSTANCES} instances ({feasible} feasible), {len(bad)} mismatches, {elapsed:.1f}s")


def criterion_2():
    violations = checked = 0
    for p in instances():
        T = p.time_constraint
        for mids, perf in split_perf_by_assignment(p, T).items():
            assignment = {node.node_id: mid for node, mid in zip(p.nodes, mids)}
            checked += 1
            if perf > exact_probability(p, assignment, T) + 1e-12:
                violations += 1
    return record(2, "split perf is a lower bound", violations == 0,
                  f"{checked} assignments, {violations} violations")


def criterion_3():
    grid = [PerfEnergy(p, e) for p in (0.0, 0.25, 0.5, 0.75, 1.0) for e in range(5)]
    violations = 0
    for a, b in itertools.product(grid, repeat=2):
        violations += combine(a, b) != combine(b, a)
    for a, b, c in itertools.product(grid, repeat=3):
        violations += combine(combine(a, b), c) != combine(a, combine(b, c))
    for a in grid:
        violations += combine(a, IDENTITY) != a or combine(IDENTITY, a) != a
    subsets = 0
    for size in range(0, 5):
        for items in itertools.combinations(grid, size):
            subsets += 1
            out = prune(items)
            violations += prune(out) != out
            violations += any(dominates(x, y) for x, y in itertools.permutations(out, 2))
            violations += any(x not in out and not any(dominates(y, x) for y in out) for x in items)
    out = prune(grid)
    violations += prune(out) != out or out != [PerfEnergy(1.0, 0)]
    return record(3, "operator algebra", violations == 0,
                  f"{len(grid)}-pair grid, {subsets + 1} prune inputs, {violations} violations")


def criterion_4():
    violations = 0
    for p in instances(200, seed=777):
        n = len(p.nodes)
        for theta in THETAS:
            prev = None  # (feasible, energy) at T - 1
            for T in range(n, 13):
                sol = outcome(solve, p.with_constraints(T, theta))
                cur = (sol is not None, sol.achieved.energy if sol else None)
                if prev is not None:
                    if prev[0] and not cur[0]:
                        violations += 1
                    elif prev[0] and cur[1] > prev[1]:
                        violations += 1
                prev = cur
        for T in range(n, 13):
            last = None
            for theta in (0.3, 0.5, 0.7, 0.9):
                sol = outcome(solve, p.with_constraints(T, theta))
                if sol is None:
                    last = float("inf")
                    continue
                if last is not None and sol.achieved.energy < last:
                    violations += 1
                last = sol.achieved.energy
    return record(4, "monotonicity", violations == 0, f"200 instances, {violations} violations")


TABLE4_PRINTED = [
    "0 1 0.7 7 2 0.6 6", "0 2 0.1 7 3 0.2 6",
    "1 1 0.8 6 2 0.7 3", "1 2 0.3 6 3 0.3 3",
    "2 1 0.8 9 2 0.8 4", "2 3 0.2 9 4 0.2 4",
    "3 2 0.7 8 5 0.8 5", "3 3 0.3 8 7 0.3 5",
    "4 2 0.6 7 4 0.8 6", "4 5 0.4 7 5 0.2 6",
    "5 1 0.7 8 2 0.7 2", "5 3 0.3 8 4 0.3 2",
    "7 1 0.8 6 3 0.8 3", "7 4 0.4 6 5 0.2 3",
]


def criterion_5():
    p = load_problem(bundled_path("table4.problem"))
    doc = yaml.safe_load(serialize_problem(p))
    lines = []
    for node in doc["nodes"]:
        m1, m2 = (m["options"] for m in node["methods"])
        lines += [" ".join([node["id"], *map(str, a), *map(str, b)]) for a, b in zip(m1, m2)]
    digits_ok = lines == TABLE4_PRINTED

    disagreements = 0
    feasible = 0
    for T in range(7, 26):
        for theta in THETAS:
            q = p.with_constraints(T, theta)
            a, b = outcome(solve, q), outcome(oracle_solve, q)
            if (a is None) != (b is None) or (a is not None and a != b):
                disagreements += 1
            feasible += a is not None

    golden = [json.loads(l) for l in (DATA / "table4_frontier_T25.jsonl").read_text().splitlines()]
    rows = full_frontier(p)
    mine = [{"t": r.t, "perf": r.perf, "energy": r.energy, "assignment": format_allotments(r.allotments)}
            for r in rows]
    golden_ok = mine == golden and write_report(rows, "csv") == (DATA / "table4_frontier_T25.csv").read_text()
    ok = digits_ok and disagreements == 0 and golden_ok
    return record(5, "table4 fixture", ok,
                  f"digits {'match' if digits_ok else 'differ'}; 57 (T, theta) cases, {feasible} feasible, "
                  f"{disagreements} disagreements; golden frontier {len(golden)} rows "
                  f"{'match' if golden_ok else 'differ'}")


def _simulate_files(name, seed, out):
    code = cli_main(["simulate", "--scenario", name, "--seed", str(seed), "--out", str(out)])
    assert code == 0
    return {f.name: f.read_bytes() for f in sorted(out.iterdir())}


def criterion_6():
    mismatches = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name in SCENARIOS:
            for seed in range(5):
                a = _simulate_files(name, seed, Path(tmp) / f"{name}-{seed}-a")
                b = _simulate_files(name, seed, Path(tmp) / f"{name}-{seed}-b")
                mismatches += a != b or "run.trace" not in a
    return record(6, "simulation determinism", mismatches == 0,
                  f"3 scenarios x 5 seeds, {mismatches} differing runs")


def criterion_7():
    mismatches = runs = 0
    for name in SCENARIOS:
        sc = load_scenario(bundled_path(name))
        for policy in ("demccm", "direct"):
            for seed in range(5):
                sim = Simulation(sc, seed, policy)
                _, trace = sim.run()
                runs += 1
                used = {d.spec.device_id: d.state.energy_used for d in sim.devices}
                mismatches += replay(trace) != used
    return record(7, "energy conservation", mismatches == 0,
                  f"{runs} runs over all bundled scenarios, {mismatches} replay mismatches")


def criterion_8(seeds=20):
    start = time.perf_counter()
    sc = load_scenario(bundled_path("unstable.scenario"))
    means = {}
    for policy in ("demccm", "direct"):
        means[policy] = sum(run(sc, s, policy=policy)[0].total_energy for s in range(seeds)) / seeds
    elapsed = time.perf_counter() - start
    ok = means["demccm"] <= means["direct"] and elapsed < 120
    return record(8, "policy comparison (model property, not a published measurement)", ok,
                  f"{seeds} seeds, mean device energy demccm={means['demccm']:.2f} "
                  f"direct={means['direct']:.2f}, {elapsed:.1f}s")


def criterion_9(seeds=20):
    sc = load_scenario(bundled_path("static.scenario"))
    worst = 0
    for s in range(seeds):
        metrics, _ = run(sc, s)
        worst = max(worst, max(metrics.handoffs.values()))
    return record(9, "handoff stability", worst <= 1, f"{seeds} seeds, max handoffs per device {worst}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(criterion):
    ok, detail = criterion()
    assert ok, detail


if __name__ == "__main__":
    results = [c()[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
