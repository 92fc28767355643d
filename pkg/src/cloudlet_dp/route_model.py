"""Value types for route selection and the algebra over (performance, energy) pairs.

Performance is treated as a completion probability: combining two route
segments multiplies their performance and adds their energy. A method's
per-time performance masses accumulate into a nondecreasing completion curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

from .errors import InfeasibleTime, ValidationError

T = TypeVar("T")


def _check_perf(perf: float, path: str = "perf") -> None:
    if isinstance(perf, bool) or not isinstance(perf, (int, float)):
        raise ValidationError(f"expected a number, got {perf!r}", path)
    if not (0.0 <= perf <= 1.0):
        raise ValidationError(f"performance {perf!r} outside [0, 1]", path)


def _check_energy(energy: float, path: str = "energy") -> None:
    if isinstance(energy, bool) or not isinstance(energy, (int, float)):
        raise ValidationError(f"expected a number, got {energy!r}", path)
    if not math.isfinite(energy) or energy < 0:
        raise ValidationError(f"energy {energy!r} must be finite and >= 0", path)


@dataclass(frozen=True, order=True)
class PerfEnergy:
    perf: float
    energy: float

    def __post_init__(self):
        _check_perf(self.perf)
        _check_energy(self.energy)


IDENTITY = PerfEnergy(1.0, 0.0)


@dataclass(frozen=True)
class ExecutionOption:
    """One row of a method profile: probability mass ``perf`` of finishing at ``time``."""

    time: int
    perf: float
    energy: float

    def __post_init__(self):
        if isinstance(self.time, bool) or not isinstance(self.time, int):
            raise ValidationError(f"time must be an integer, got {self.time!r}", "time")
        if self.time < 1:
            raise ValidationError(f"time {self.time} must be >= 1", "time")
        _check_perf(self.perf)
        _check_energy(self.energy)


@dataclass(frozen=True)
class MethodProfile:
    method_id: str
    options: tuple[ExecutionOption, ...]

    def __post_init__(self):
        object.__setattr__(self, "options", tuple(self.options))
        if not self.options:
            raise ValidationError("a method needs at least one option", "options")
        for i in range(1, len(self.options)):
            if self.options[i].time <= self.options[i - 1].time:
                raise ValidationError(
                    "option times must be strictly increasing", f"options[{i}].time"
                )
        # Energy is a property of the method, not of when it finishes.
        e0 = self.options[0].energy
        for i, opt in enumerate(self.options):
            if opt.energy != e0:
                raise ValidationError(
                    f"energy {opt.energy!r} differs from the method's energy {e0!r}",
                    f"options[{i}].energy",
                )

    @property
    def energy(self) -> float:
        return self.options[0].energy

    @property
    def min_time(self) -> int:
        return self.options[0].time

    def curve_values(self, horizon: int) -> list[float]:
        """Cumulative performance at t = 0..horizon (index 0 is always 0.0).

        Masses may over-fill (some bundled profiles sum past 1), so the
        running sum is capped at 1.
        """
        values = [0.0] * (horizon + 1)
        acc = 0.0
        k = 0
        opts = self.options
        for t in range(1, horizon + 1):
            while k < len(opts) and opts[k].time <= t:
                acc += opts[k].perf
                k += 1
            values[t] = acc if acc < 1.0 else 1.0
        return values


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    methods: tuple[MethodProfile, ...]

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise ValidationError("a node needs at least one method", "methods")
        seen = set()
        for i, m in enumerate(self.methods):
            if m.method_id in seen:
                raise ValidationError(f"duplicate method id {m.method_id!r}", f"methods[{i}].id")
            seen.add(m.method_id)

    def method(self, method_id: str) -> MethodProfile:
        for m in self.methods:
            if m.method_id == method_id:
                return m
        raise KeyError(method_id)


@dataclass(frozen=True)
class RouteProblem:
    """A series chain of nodes, a time budget and a confidence threshold."""

    nodes: tuple[NodeSpec, ...]
    time_constraint: int
    confidence: float

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise ValidationError("a problem needs at least one node", "nodes")
        seen = set()
        for i, n in enumerate(self.nodes):
            if n.node_id in seen:
                raise ValidationError(f"duplicate node id {n.node_id!r}", f"nodes[{i}].id")
            seen.add(n.node_id)
        t = self.time_constraint
        if isinstance(t, bool) or not isinstance(t, int) or t < 1:
            raise ValidationError(f"time constraint must be an integer >= 1, got {t!r}", "time_constraint")
        c = self.confidence
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not (0.0 < c <= 1.0):
            raise ValidationError(f"confidence must lie in (0, 1], got {c!r}", "confidence")
        if t < len(self.nodes):
            raise InfeasibleTime(
                f"time constraint {t} is shorter than the {len(self.nodes)} nodes in the chain",
                "time_constraint",
            )

    def with_constraints(self, time_constraint: int | None = None,
                         confidence: float | None = None) -> "RouteProblem":
        return RouteProblem(
            self.nodes,
            self.time_constraint if time_constraint is None else time_constraint,
            self.confidence if confidence is None else confidence,
        )

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)


def combine(a: PerfEnergy, b: PerfEnergy) -> PerfEnergy:
    return PerfEnergy(a.perf * b.perf, a.energy + b.energy)


def dominates(a: PerfEnergy, b: PerfEnergy) -> bool:
    return (a.perf >= b.perf and a.energy <= b.energy
            and (a.perf > b.perf or a.energy < b.energy))


def prune(items: Iterable[T], pair: Callable[[T], PerfEnergy] | None = None,
          tiebreak: Callable[[T], object] | None = None) -> list[T]:
    """Keep the non-dominated items, ordered by ascending energy.

    Among items with identical pairs only one survives: the smallest under
    ``tiebreak`` when given, otherwise the first in input order.
    """
    get = pair if pair is not None else (lambda x: x)
    if tiebreak is None:
        order = sorted(items, key=lambda x: (get(x).energy, -get(x).perf))
    else:
        order = sorted(items, key=lambda x: (get(x).energy, -get(x).perf, tiebreak(x)))
    kept: list[T] = []
    best = -math.inf
    for item in order:
        p = get(item).perf
        if p > best:
            kept.append(item)
            best = p
    return kept


def cumulative_curve(m: MethodProfile, horizon: int) -> dict[int, float]:
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}", "horizon")
    values = m.curve_values(horizon)
    return {t: values[t] for t in range(1, horizon + 1)}


def method_order(methods: Sequence[MethodProfile]) -> list[MethodProfile]:
    """Methods sorted by id, the order used for lexicographic tie-breaking."""
    return sorted(methods, key=lambda m: m.method_id)
