"""Pareto-frontier dynamic program over a chain of nodes.

``frontier(i, t)`` holds every non-dominated (perf, energy) pair reachable by
choosing one method and a positive time allotment for each of the first
``i + 1`` nodes with total time at most ``t``. Node ``i`` extends the frontier
of its predecessor at budget ``t - tau`` by each method's cumulative
performance at ``tau``, then the union is pruned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InfeasibleTime, NoFeasibleRoute
from .route_model import (
    IDENTITY,
    PerfEnergy,
    RouteProblem,
    prune,
)

log = logging.getLogger(__name__)

# Float cumulative sums such as 0.7 + 0.2 land a hair below 0.9.
CONFIDENCE_SLACK = 1e-9


def meets_confidence(perf: float, confidence: float) -> bool:
    return perf >= confidence - CONFIDENCE_SLACK


class Allotment(NamedTuple):
    node_id: str
    method_id: str
    time: int


@dataclass(frozen=True, eq=False)
class FrontierEntry:
    pair: PerfEnergy
    prev: "FrontierEntry | None"
    method_id: str | None
    allotted: int
    # Prefix method ids and allotted times, kept for tie-breaking.
    methods: tuple[str, ...] = ()
    times: tuple[int, ...] = ()

    @property
    def key(self):
        return (self.pair.energy, -self.pair.perf, self.methods, self.times)

    def tiebreak(self):
        return (self.methods, self.times)


ROOT = FrontierEntry(IDENTITY, None, None, 0)


@dataclass(frozen=True)
class ParetoFrontier:
    problem: RouteProblem
    per_time: dict[int, list[FrontierEntry]]

    def entries(self, t: int) -> list[FrontierEntry]:
        return self.per_time.get(t, [])


@dataclass(frozen=True)
class RouteSolution:
    allotments: tuple[Allotment, ...]
    achieved: PerfEnergy
    time_used: int

    @property
    def assignment(self) -> dict[str, tuple[str, int]]:
        return {a.node_id: (a.method_id, a.time) for a in self.allotments}


class FrontierRow(NamedTuple):
    t: int
    perf: float
    energy: float
    allotments: tuple[Allotment, ...]


def reconstruct(problem: RouteProblem, entry: FrontierEntry) -> tuple[Allotment, ...]:
    chain = []
    e = entry
    while e.prev is not None:
        chain.append((e.method_id, e.allotted))
        e = e.prev
    chain.reverse()
    if len(chain) != len(problem.nodes):
        raise ValueError("entry does not span the whole chain")
    return tuple(Allotment(n.node_id, m, t) for n, (m, t) in zip(problem.nodes, chain))


def evaluate(problem: RouteProblem, allotments) -> PerfEnergy:
    """Recompute (perf, energy) of an allotment straight from the method profiles."""
    perf, energy = 1.0, 0.0
    for node, a in zip(problem.nodes, allotments):
        m = node.method(a.method_id)
        perf = perf * m.curve_values(a.time)[a.time]
        energy = energy + m.energy
    return PerfEnergy(perf, energy)


def build_frontiers(problem: RouteProblem, pruning: bool = True) -> ParetoFrontier:
    n = len(problem.nodes)
    T = problem.time_constraint
    if T < n:
        raise InfeasibleTime(f"time constraint {T} is shorter than the {n} nodes", "time_constraint")

    prev = {t: [ROOT] for t in range(0, T + 1)}
    for i, node in enumerate(problem.nodes):
        curves = [(m, m.curve_values(T)) for m in node.methods]
        cur: dict[int, list[FrontierEntry]] = {}
        for t in range(i + 1, T + 1):
            cands = []
            for m, curve in curves:
                mid = m.method_id
                em = m.energy
                # the first i nodes need at least i time units between them
                for tau in range(1, t - i + 1):
                    c = curve[tau]
                    if c == 0.0:
                        continue
                    for e in prev.get(t - tau, ()):
                        perf = e.pair.perf * c
                        if perf == 0.0:
                            continue
                        cands.append(FrontierEntry(
                            PerfEnergy(perf, e.pair.energy + em), e, mid, tau,
                            e.methods + (mid,), e.times + (tau,),
                        ))
            if pruning:
                cands = prune(cands, pair=lambda x: x.pair, tiebreak=FrontierEntry.tiebreak)
            else:
                cands.sort(key=lambda x: x.key)
            cur[t] = cands
        prev = cur
        log.debug("node %s: frontier size at T=%d is %d", node.node_id, T, len(cur.get(T, ())))

    per_time = {t: prev.get(t, []) for t in range(1, T + 1)}
    return ParetoFrontier(problem, per_time)


def _select(problem: RouteProblem, entries: list[FrontierEntry]) -> RouteSolution:
    theta = problem.confidence
    ok = [e for e in entries if meets_confidence(e.pair.perf, theta)]
    if not ok:
        best = None
        if entries:
            b = min(entries, key=lambda e: (-e.pair.perf, e.pair.energy, e.methods, e.times))
            best = FrontierRow(problem.time_constraint, b.pair.perf, b.pair.energy,
                               reconstruct(problem, b))
        raise NoFeasibleRoute(
            f"no route reaches confidence {theta} within {problem.time_constraint} time units",
            best=best,
        )
    chosen = min(ok, key=lambda e: e.key)
    allot = reconstruct(problem, chosen)
    return RouteSolution(allot, chosen.pair, sum(a.time for a in allot))


def solve(problem: RouteProblem, pruning: bool = True) -> RouteSolution:
    """Minimum-energy route whose performance reaches the problem's confidence.

    Ties go to higher performance, then to the lexicographically smallest
    method assignment (in chain order), then to the smallest time allotment.
    """
    frontier = build_frontiers(problem, pruning=pruning)
    # Budgets are "at most t", so the last slot already covers every t <= T.
    return _select(problem, frontier.entries(problem.time_constraint))


def full_frontier(problem: RouteProblem) -> list[FrontierRow]:
    frontier = build_frontiers(problem)
    rows = []
    for t in range(1, problem.time_constraint + 1):
        for e in frontier.entries(t):
            rows.append(FrontierRow(t, e.pair.perf, e.pair.energy, reconstruct(problem, e)))
    return rows
