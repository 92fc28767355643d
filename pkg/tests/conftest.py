import itertools
import random
from pathlib import Path

import pytest

from cloudlet_dp.route_model import ExecutionOption, MethodProfile, NodeSpec, RouteProblem
from cloudlet_dp.scenario_io import bundled_path, load_problem

DATA = Path(__file__).parent / "data"


def random_problem(rng: random.Random, max_nodes=5, max_methods=3, max_options=4, max_T=12,
                   thetas=(0.5, 0.7, 0.9)) -> RouteProblem:
    """Small chain with perf masses on a 0.05 grid summing to at most 1."""
    n = rng.randint(1, max_nodes)
    nodes = []
    for i in range(n):
        methods = []
        for j in range(rng.randint(1, max_methods)):
            k = rng.randint(1, max_options)
            times = sorted(rng.sample(range(1, 7), k))
            budget = 20
            opts = []
            energy = rng.randint(0, 9)
            for t in times:
                mass = rng.randint(0, budget)
                budget -= mass
                opts.append(ExecutionOption(t, mass / 20, energy))
            methods.append(MethodProfile(f"m{j}", tuple(opts)))
        nodes.append(NodeSpec(f"n{i}", tuple(methods)))
    T = rng.randint(n, max(n, max_T))
    return RouteProblem(tuple(nodes), T, rng.choice(thetas))


def naive_candidates(problem: RouteProblem, T: int | None = None):
    """Every method assignment with every positive time split summing to <= T.

    Plain loops with no pruning and no breakpoint shortcut: the most literal
    reading of the objective, used to check both solver and oracle.
    """
    T = problem.time_constraint if T is None else T
    per_node = [sorted(node.methods, key=lambda m: m.method_id) for node in problem.nodes]
    n = len(per_node)
    for methods in itertools.product(*per_node):
        for split in itertools.product(range(1, T + 1), repeat=n):
            if sum(split) > T:
                continue
            perf, energy = 1.0, 0.0
            for m, tau in zip(methods, split):
                acc = 0.0
                for o in m.options:
                    if o.time <= tau:
                        acc += o.perf
                perf = perf * min(acc, 1.0)
                energy = energy + m.energy
            yield perf, energy, tuple(m.method_id for m in methods), split


def naive_solve(problem: RouteProblem):
    best = None
    for perf, energy, mids, split in naive_candidates(problem):
        if perf <= 0 or perf < problem.confidence - 1e-9:
            continue
        key = (energy, -perf, mids, split)
        if best is None or key < best:
            best = key
    return best


@pytest.fixture(scope="session")
def table4():
    return load_problem(bundled_path("table4.problem"))


@pytest.fixture
def node0(table4):
    return RouteProblem((table4.node("0"),), 2, 0.75)


@pytest.fixture
def nodes01(table4):
    return RouteProblem((table4.node("0"), table4.node("1")), 2, 0.5)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
