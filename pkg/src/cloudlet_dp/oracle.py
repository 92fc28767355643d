"""Brute-force reference for the route solver.

Every method assignment is enumerated together with every time allotment in
which each node receives exactly one of its chosen method's option times.
A cumulative curve is a step function that only changes at option times, so
moving an allotment down to the nearest option time keeps the (perf, energy)
pair and shortens the route; the optimum and its tie-break winner therefore
always lie in this set. The enumeration is vectorised with numpy but shares
no code with the dynamic program.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .dp_solver import Allotment, FrontierRow, RouteSolution, meets_confidence
from .errors import InfeasibleTime, NoFeasibleRoute, TooLarge
from .route_model import PerfEnergy, RouteProblem

ENUMERATION_LIMIT = 10**7


def enumerate_assignments(problem: RouteProblem) -> Iterator[dict[str, str]]:
    """All node -> method maps, lexicographic in chain order."""
    ids = [sorted(m.method_id for m in node.methods) for node in problem.nodes]
    for combo in itertools.product(*ids):
        yield {node.node_id: mid for node, mid in zip(problem.nodes, combo)}


def candidate_count(problem: RouteProblem) -> int:
    count = 1
    for node in problem.nodes:
        count *= sum(len(m.options) for m in node.methods)
    return count


@dataclass
class _Candidates:
    perf: np.ndarray
    energy: np.ndarray
    time: np.ndarray
    ranks: np.ndarray  # (n_nodes, N) method rank per node
    times: np.ndarray  # (n_nodes, N) allotted time per node
    method_ids: list[list[str]]


def _node_table(node):
    rows = []
    methods = sorted(node.methods, key=lambda m: m.method_id)
    for rank, m in enumerate(methods):
        acc = 0.0
        for opt in m.options:
            acc = acc + opt.perf
            rows.append((min(acc, 1.0), float(m.energy), opt.time, rank))
    return rows, [m.method_id for m in methods]


def _enumerate(problem: RouteProblem) -> _Candidates:
    n = len(problem.nodes)
    if n > problem.time_constraint:
        raise InfeasibleTime(
            f"time constraint {problem.time_constraint} is shorter than the {n} nodes",
            "time_constraint",
        )
    count = candidate_count(problem)
    if count > ENUMERATION_LIMIT:
        raise TooLarge(f"{count} candidates exceed the enumeration limit of {ENUMERATION_LIMIT}")

    tables, ids = zip(*(_node_table(node) for node in problem.nodes))
    shape = tuple(len(t) for t in tables)
    cols = [np.array(t, dtype=float).reshape(-1, 4) for t in tables]

    perf = cols[0][:, 0].copy()
    energy = cols[0][:, 1].copy()
    total = cols[0][:, 2].astype(np.int64)
    for c in cols[1:]:
        perf = (perf[:, None] * c[None, :, 0]).ravel()
        energy = (energy[:, None] + c[None, :, 1]).ravel()
        total = (total[:, None] + c[None, :, 2].astype(np.int64)).ravel()

    idx = np.unravel_index(np.arange(count), shape)
    ranks = np.stack([cols[i][idx[i], 3].astype(np.int64) for i in range(n)])
    times = np.stack([cols[i][idx[i], 2].astype(np.int64) for i in range(n)])
    return _Candidates(perf, energy, total, ranks, times, [list(x) for x in ids])


def _lex_order(c: _Candidates, sel: np.ndarray) -> np.ndarray:
    """Indices in ``sel`` sorted by (energy, -perf, method ranks, times)."""
    keys = [c.times[i][sel] for i in reversed(range(c.times.shape[0]))]
    keys += [c.ranks[i][sel] for i in reversed(range(c.ranks.shape[0]))]
    keys += [-c.perf[sel], c.energy[sel]]
    return sel[np.lexsort(keys)]


def _allotments(problem: RouteProblem, c: _Candidates, k: int) -> tuple[Allotment, ...]:
    return tuple(
        Allotment(node.node_id, c.method_ids[i][int(c.ranks[i][k])], int(c.times[i][k]))
        for i, node in enumerate(problem.nodes)
    )


def oracle_solve(problem: RouteProblem) -> RouteSolution:
    c = _enumerate(problem)
    T = problem.time_constraint
    fits = (c.time <= T) & (c.perf > 0.0)
    ok = np.flatnonzero(fits & meets_confidence(c.perf, problem.confidence))
    if ok.size == 0:
        best = None
        cand = np.flatnonzero(fits)
        if cand.size:
            keys = [c.times[i][cand] for i in reversed(range(len(problem.nodes)))]
            keys += [c.ranks[i][cand] for i in reversed(range(len(problem.nodes)))]
            keys += [c.energy[cand], -c.perf[cand]]
            k = cand[np.lexsort(keys)][0]
            best = FrontierRow(T, float(c.perf[k]), float(c.energy[k]), _allotments(problem, c, k))
        raise NoFeasibleRoute(
            f"no route reaches confidence {problem.confidence} within {T} time units", best=best
        )
    k = _lex_order(c, ok)[0]
    allot = _allotments(problem, c, k)
    return RouteSolution(allot, PerfEnergy(float(c.perf[k]), float(c.energy[k])), int(c.time[k]))


def oracle_frontier(problem: RouteProblem) -> list[FrontierRow]:
    """Non-dominated (perf, energy) pairs for every budget t in [1, T]."""
    c = _enumerate(problem)
    rows: list[FrontierRow] = []
    for t in range(1, problem.time_constraint + 1):
        sel = np.flatnonzero((c.time <= t) & (c.perf > 0.0))
        if sel.size == 0:
            continue
        order = _lex_order(c, sel)
        p = c.perf[order]
        running = np.maximum.accumulate(p)
        before = np.concatenate(([-np.inf], running[:-1]))
        for k in order[p > before]:
            rows.append(FrontierRow(t, float(c.perf[k]), float(c.energy[k]),
                                    _allotments(problem, c, k)))
    return rows


def split_perf_by_assignment(problem: RouteProblem, T: int | None = None) -> dict[tuple[str, ...], float]:
    """Max over time splits (total <= T) of the product of cumulative curves, per assignment.

    Assignments whose best split has zero performance map to 0.0.
    """
    T = problem.time_constraint if T is None else T
    c = _enumerate(problem.with_constraints(time_constraint=max(T, len(problem.nodes))))
    n = len(problem.nodes)
    sizes = [len(ids) for ids in c.method_ids]
    flat = np.ravel_multi_index(tuple(c.ranks[i] for i in range(n)), sizes)
    best = np.zeros(int(np.prod(sizes)))
    fits = c.time <= T
    np.maximum.at(best, flat[fits], c.perf[fits])
    out = {}
    for k, combo in enumerate(itertools.product(*[range(s) for s in sizes])):
        out[tuple(c.method_ids[i][r] for i, r in enumerate(combo))] = float(best[k])
    return out


def exact_probability(problem: RouteProblem, assignment: Mapping[str, str], T: int) -> float:
    """P(sum of node completion times <= T); missing mass never completes."""
    dist = np.zeros(T + 1)
    dist[0] = 1.0
    for node in problem.nodes:
        m = node.method(assignment[node.node_id])
        pmf = np.zeros(T + 1)
        for opt in m.options:
            if opt.time <= T:
                pmf[opt.time] += opt.perf
        dist = np.convolve(dist, pmf)[: T + 1]
    return float(min(1.0, dist.sum()))
