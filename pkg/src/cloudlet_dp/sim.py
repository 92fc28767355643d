"""Discrete-event simulation of devices, cloudlets and cloud servers.

Timestamps are integer ticks; events at the same tick run in the order they
were scheduled (a global sequence number breaks ties), so a run is a pure
function of the scenario and the seed.

Under the ``demccm`` policy a device attaches to the nearest cloudlet, which
routes each offloaded request over the minimum-energy route found by the
dynamic program and may hand the device over to a cloudlet with a lower
predicted cost. Under ``direct`` the device talks to the cloud over its own
link. Either way, a dropped link puts the device into the searching state
until it reconnects, which is where most wasted energy comes from.

Each device draws one uniform number per tick from its own RNG stream,
whatever its state, so both policies see the same random sequence.
"""

from __future__ import annotations

import heapq
import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dp_solver import RouteSolution, solve
from .errors import NoFeasibleRoute
from .scenario_io import AppSpec, DeviceSpec, LinkModel, PowerTable, Scenario, report_table

log = logging.getLogger(__name__)

DIRECT = "@cloud"


@dataclass
class DeviceState:
    device_id: str
    position: tuple[float, float]
    radio_state: str = "searching"
    attached_cloudlet: str | None = None
    energy_used: float = 0.0


@dataclass
class CloudletState:
    cloudlet_id: str
    position: tuple[float, float]
    route_problems: dict
    load: int = 0
    _route: RouteSolution | None = field(default=None, repr=False)
    _solved: bool = field(default=False, repr=False)

    def best_route(self) -> RouteSolution | None:
        """Minimum-energy feasible route over all servers (None if none is feasible)."""
        if not self._solved:
            best = None
            for server_id in sorted(self.route_problems):
                try:
                    sol = solve(self.route_problems[server_id])
                except NoFeasibleRoute:
                    continue
                if best is None or sol.achieved.energy < best.achieved.energy:
                    best = sol
            self._route = best
            self._solved = True
        return self._route

    @property
    def route_energy(self) -> float:
        r = self.best_route()
        return math.inf if r is None else r.achieved.energy


def device_energy_step(radio_state: str, duration: float, power_table: PowerTable) -> float:
    return power_table.power(radio_state) * duration


def nearest_cloudlet(d: DeviceState, cloudlets: Sequence[CloudletState]) -> str:
    return min(cloudlets, key=lambda c: (math.dist(d.position, c.position), c.cloudlet_id)).cloudlet_id


def predicted_cost(d: DeviceState, c: CloudletState, energy_weight: float = 0.5,
                   latency_weight: float = 0.5, latency_per_distance: float = 1.0) -> float:
    if math.isinf(c.route_energy):
        return math.inf
    return (energy_weight * c.route_energy
            + latency_weight * latency_per_distance * math.dist(d.position, c.position))


def handoff_check(d: DeviceState, current: CloudletState, candidates: Sequence[CloudletState],
                  hysteresis: float = 0.1,
                  cost: Callable[[DeviceState, CloudletState], float] | None = None) -> str | None:
    """Id of the best candidate beating the current cloudlet by the hysteresis margin."""
    cost = cost or predicted_cost
    threshold = cost(d, current) * (1.0 - hysteresis)
    best = None
    best_cost = math.inf
    for c in sorted(candidates, key=lambda c: c.cloudlet_id):
        if c.cloudlet_id == current.cloudlet_id:
            continue
        cc = cost(d, c)
        if cc < threshold and cc < best_cost:
            best, best_cost = c.cloudlet_id, cc
    return best


def offload_decision(user_pref: str, link: LinkModel, device_capability: float, app: AppSpec) -> bool:
    if user_pref == "disabled" or not app.partitionable:
        return False
    transfer = app.input_size / link.bandwidth
    local_estimate = app.work / device_capability
    return transfer + link.base_latency <= local_estimate


def transfer_ticks(size: float, link: LinkModel) -> int:
    return max(1, math.ceil(size / link.bandwidth) + link.base_latency)


@dataclass
class SimMetrics:
    policy: str
    seed: int
    device_energy: dict[str, float] = field(default_factory=dict)
    search_energy: dict[str, float] = field(default_factory=dict)
    handoffs: dict[str, int] = field(default_factory=dict)
    completed: dict[str, int] = field(default_factory=dict)
    latencies: list[tuple[str, int]] = field(default_factory=list)
    infeasible_routes: int = 0
    offloaded: int = 0
    local: int = 0
    unfinished: int = 0
    route_energy: float = 0.0

    @property
    def total_energy(self) -> float:
        total = 0.0
        for v in self.device_energy.values():
            total += v
        return total

    @property
    def total_search_energy(self) -> float:
        total = 0.0
        for v in self.search_energy.values():
            total += v
        return total

    @property
    def total_handoffs(self) -> int:
        return sum(self.handoffs.values())

    def latency_percentile(self, q: float, device: str | None = None) -> float:
        xs = [lat for d, lat in self.latencies if device is None or d == device]
        if not xs:
            return math.nan
        return float(np.percentile(xs, q))

    def summary(self) -> dict:
        return {
            "policy": self.policy,
            "seed": self.seed,
            "devices": len(self.device_energy),
            "total_energy": self.total_energy,
            "search_energy": self.total_search_energy,
            "route_energy": self.route_energy,
            "requests_completed": len(self.latencies),
            "latency_p50": self.latency_percentile(50),
            "latency_p95": self.latency_percentile(95),
            "handoffs": self.total_handoffs,
            "infeasible_routes": self.infeasible_routes,
            "offloaded": self.offloaded,
            "local": self.local,
            "unfinished": self.unfinished,
        }


@dataclass
class _Device:
    spec: DeviceSpec
    state: DeviceState
    rng: np.random.Generator
    seg_start: int = 0
    queue: deque = field(default_factory=deque)
    active: dict | None = None
    epoch: int = 0
    previous: str | None = None
    requests: int = 0


class EventQueue:
    def __init__(self):
        self._heap = []
        self._seq = 0

    def push(self, time: int, kind: str, **payload):
        heapq.heappush(self._heap, (time, self._seq, kind, payload))
        self._seq += 1

    def pop(self):
        return heapq.heappop(self._heap)

    def __bool__(self):
        return bool(self._heap)

    def peek_time(self) -> int:
        return self._heap[0][0]


def device_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def position_at(waypoints, t: int) -> tuple[float, float]:
    if t <= waypoints[0][0]:
        return (float(waypoints[0][1]), float(waypoints[0][2]))
    for (t0, x0, y0), (t1, x1, y1) in zip(waypoints, waypoints[1:]):
        if t <= t1:
            f = (t - t0) / (t1 - t0)
            return (x0 + f * (x1 - x0), y0 + f * (y1 - y0))
    return (float(waypoints[-1][1]), float(waypoints[-1][2]))


class Simulation:
    def __init__(self, scenario: Scenario, seed: int, policy: str | None = None):
        self.sc = scenario
        self.seed = seed
        self.policy = policy or scenario.policy
        self.now = 0
        self.trace: list[dict] = []
        self._seq = 0
        self.events = EventQueue()
        self.metrics = SimMetrics(self.policy, seed)
        self.cloudlets = {
            c.cloudlet_id: CloudletState(c.cloudlet_id, tuple(c.position),
                                         {s.server_id: s.problem for s in c.servers})
            for c in scenario.cloudlets
        }
        self.cloudlet_specs = {c.cloudlet_id: c for c in scenario.cloudlets}
        self.devices = [
            _Device(d, DeviceState(d.device_id, position_at(d.waypoints, 0)), device_rng(seed, i))
            for i, d in enumerate(scenario.devices)
        ]
        for d in self.devices:
            self.metrics.device_energy[d.spec.device_id] = 0.0
            self.metrics.search_energy[d.spec.device_id] = 0.0
            self.metrics.handoffs[d.spec.device_id] = 0
            self.metrics.completed[d.spec.device_id] = 0

    # -- bookkeeping ---------------------------------------------------------

    def _emit(self, kind: str, dev: _Device | None = None, **fields):
        rec = {"t": self.now, "seq": self._seq, "type": kind}
        if dev is not None:
            rec["device"] = dev.spec.device_id
            rec["radio_state"] = dev.state.radio_state
            rec["attached"] = dev.state.attached_cloudlet
        rec.update(fields)
        self.trace.append(rec)
        self._seq += 1

    def _account(self, dev: _Device, state: str, start: int, duration: int):
        if duration <= 0:
            return
        e = device_energy_step(state, duration, dev.spec.power)
        dev.state.energy_used += e
        did = dev.spec.device_id
        self.metrics.device_energy[did] = dev.state.energy_used
        if state == "searching":
            self.metrics.search_energy[did] += e
        self._emit("energy", dev, state=state, start=start, duration=duration, energy=e)

    def _set_radio(self, dev: _Device, state: str):
        if state == dev.state.radio_state:
            return
        self._account(dev, dev.state.radio_state, dev.seg_start, self.now - dev.seg_start)
        dev.seg_start = self.now
        dev.state.radio_state = state

    # -- policy helpers --------------------------------------------------------

    def _uplink(self, dev: _Device) -> LinkModel:
        if self.policy == "direct":
            return self.sc.link(dev.spec.direct_link)
        return self.sc.link(self.cloudlet_specs[dev.state.attached_cloudlet].access_link)

    def _service(self, cloudlet_id: str) -> tuple[int, float]:
        spec = self.cloudlet_specs[cloudlet_id]
        if spec.stats_row is None:
            return self.sc.cloudlet_service_time, 0.0
        pairs = self.sc.table3.pairs(spec.stats_row)
        index = sum(p for p, _ in pairs) / len(pairs)
        energy = sum(e for _, e in pairs) / len(pairs)
        return max(1, math.ceil(index * self.sc.service_scale)), energy

    def _cost(self, d: DeviceState, c: CloudletState) -> float:
        return predicted_cost(d, c, self.sc.energy_weight, self.sc.latency_weight,
                              self.sc.latency_per_distance)

    # -- event handlers --------------------------------------------------------

    def _attach(self, dev: _Device):
        if self.policy == "direct":
            target = DIRECT
        elif dev.previous is not None:
            # resume the previous association; moving away is the handoff logic's job
            target = dev.previous
        else:
            target = nearest_cloudlet(dev.state, list(self.cloudlets.values()))
        self._set_radio(dev, "idle")
        dev.state.attached_cloudlet = target
        dev.previous = target
        self._emit("attach", dev, target=target)
        self._try_start(dev)

    def _link_down(self, dev: _Device):
        act = dev.active
        if act is not None and act["phase"] != "local":
            if act["phase"] == "remote" and act.get("cloudlet"):
                self.cloudlets[act["cloudlet"]].load -= 1
            dev.active = None
        dev.epoch += 1
        self._set_radio(dev, "searching")
        dev.state.attached_cloudlet = None
        self._emit("link_down", dev)
        self.events.push(self.now + self.sc.search_duration, "search_done",
                         dev=dev, epoch=dev.epoch)

    def _tick(self):
        for dev in self.devices:
            u = dev.rng.random()
            dev.state.position = position_at(dev.spec.waypoints, self.now)
            if dev.state.attached_cloudlet is None:
                continue
            if u >= self._uplink(dev).stability:
                self._link_down(dev)
                continue
            busy = dev.active is not None and dev.active["phase"] in ("uplink", "downlink")
            if self.policy == "demccm" and not busy:
                cur = self.cloudlets[dev.state.attached_cloudlet]
                target = handoff_check(dev.state, cur, list(self.cloudlets.values()),
                                       self.sc.hysteresis, self._cost)
                if target is not None:
                    dev.state.attached_cloudlet = target
                    dev.previous = target
                    self.metrics.handoffs[dev.spec.device_id] += 1
                    self._emit("handoff", dev, source=cur.cloudlet_id, target=target)
        if self.now + 1 <= self.sc.horizon:
            self.events.push(self.now + 1, "tick")

    def _request(self, dev: _Device):
        idx = dev.requests
        dev.requests += 1
        dev.queue.append((idx, self.now))
        self._emit("request", dev, request=idx)
        nxt = self.now + dev.spec.request_interval
        if nxt <= self.sc.horizon:
            self.events.push(nxt, "request", dev=dev)
        self._try_start(dev)

    def _try_start(self, dev: _Device):
        if dev.active is not None or not dev.queue:
            return
        spec = dev.spec
        idx, arrival = dev.queue[0]
        wants_remote = spec.offload == "enabled" and spec.app.partitionable
        if wants_remote and dev.state.attached_cloudlet is None:
            return  # wait for the link
        route = None
        remote = False
        if wants_remote:
            remote = offload_decision(spec.offload, self._uplink(dev), spec.capability, spec.app)
            if remote and self.policy == "demccm":
                route = self.cloudlets[dev.state.attached_cloudlet].best_route()
                if route is None:
                    self.metrics.infeasible_routes += 1
                    self._emit("infeasible_route", dev, request=idx)
                    remote = False
        if not remote:
            ticks = max(1, math.ceil(spec.app.work / spec.capability))
            dev.active = {"phase": "local", "request": idx, "arrival": arrival, "start": self.now}
            self.metrics.local += 1
            self._emit("local_start", dev, request=idx)
            self.events.push(self.now + ticks, "local_done", dev=dev, epoch=None)
            return
        dev.active = {"phase": "uplink", "request": idx, "arrival": arrival, "route": route,
                      "cloudlet": dev.state.attached_cloudlet if self.policy == "demccm" else None}
        self.metrics.offloaded += 1
        self._set_radio(dev, "transmitting")
        self._emit("uplink_start", dev, request=idx)
        self.events.push(self.now + transfer_ticks(spec.app.input_size, self._uplink(dev)),
                         "uplink_done", dev=dev, epoch=dev.epoch)

    def _uplink_done(self, dev: _Device):
        act = dev.active
        act["phase"] = "remote"
        self._set_radio(dev, "idle")
        if self.policy == "demccm":
            c = self.cloudlets[act["cloudlet"]]
            c.load += 1
            service, service_energy = self._service(c.cloudlet_id)
            route = act["route"]
            propagation = math.ceil(self.sc.latency_per_distance * math.dist(dev.state.position, c.position))
            remote = propagation + route.time_used + service
            self.metrics.route_energy += route.achieved.energy + service_energy
            self._emit("remote_start", dev, request=act["request"], cloudlet=c.cloudlet_id,
                       load=c.load, route_energy=route.achieved.energy)
        else:
            remote = self.sc.cloud_service_time
            self._emit("remote_start", dev, request=act["request"], cloudlet=DIRECT)
        self.events.push(self.now + remote, "remote_done", dev=dev, epoch=dev.epoch)

    def _remote_done(self, dev: _Device):
        act = dev.active
        if act.get("cloudlet"):
            self.cloudlets[act["cloudlet"]].load -= 1
        act["phase"] = "downlink"
        self._set_radio(dev, "receiving")
        self._emit("downlink_start", dev, request=act["request"])
        self.events.push(self.now + transfer_ticks(dev.spec.app.output_size, self._uplink(dev)),
                         "downlink_done", dev=dev, epoch=dev.epoch)

    def _complete(self, dev: _Device):
        act = dev.active
        latency = self.now - act["arrival"]
        self.metrics.latencies.append((dev.spec.device_id, latency))
        self.metrics.completed[dev.spec.device_id] += 1
        dev.queue.popleft()
        dev.active = None
        self._emit("complete", dev, request=act["request"], latency=latency)
        self._try_start(dev)

    def _downlink_done(self, dev: _Device):
        self._set_radio(dev, "idle")
        self._complete(dev)

    def _local_done(self, dev: _Device):
        act = dev.active
        self._account(dev, "computing", act["start"], self.now - act["start"])
        self._complete(dev)

    # -- main loop ---------------------------------------------------------------

    def run(self):
        if self.devices:
            for dev in self.devices:
                self.events.push(self.sc.search_duration, "search_done", dev=dev, epoch=dev.epoch)
                if dev.spec.first_request <= self.sc.horizon:
                    self.events.push(dev.spec.first_request, "request", dev=dev)
            self.events.push(1, "tick")
        handlers = {
            "tick": lambda p: self._tick(),
            "search_done": lambda p: self._attach(p["dev"]),
            "request": lambda p: self._request(p["dev"]),
            "uplink_done": lambda p: self._uplink_done(p["dev"]),
            "remote_done": lambda p: self._remote_done(p["dev"]),
            "downlink_done": lambda p: self._downlink_done(p["dev"]),
            "local_done": lambda p: self._local_done(p["dev"]),
        }
        while self.events and self.events.peek_time() <= self.sc.horizon:
            time, _, kind, payload = self.events.pop()
            self.now = time
            dev = payload.get("dev")
            epoch = payload.get("epoch")
            if epoch is not None and dev is not None and epoch != dev.epoch:
                continue  # superseded by a link failure
            handlers[kind](payload)
        self.now = self.sc.horizon
        for dev in self.devices:
            self._account(dev, dev.state.radio_state, dev.seg_start, self.now - dev.seg_start)
            dev.seg_start = self.now
            act = dev.active
            if act is not None and act["phase"] == "local":
                self._account(dev, "computing", act["start"], self.now - act["start"])
            self.metrics.unfinished += len(dev.queue)
        return self.metrics, self.trace


def run(scenario: Scenario, seed: int, policy: str | None = None) -> tuple[SimMetrics, list[dict]]:
    log.debug("run policy=%s seed=%d", policy or scenario.policy, seed)
    return Simulation(scenario, seed, policy).run()


def baseline_direct_to_cloud(scenario: Scenario, seed: int) -> tuple[SimMetrics, list[dict]]:
    return run(scenario, seed, policy="direct")


def replay(trace: list[dict]) -> dict[str, float]:
    """Per-device energy rebuilt from the trace's energy segments, in trace order."""
    totals: dict[str, float] = {}
    for rec in trace:
        if rec["type"] == "attach" or rec["type"] == "request":
            totals.setdefault(rec["device"], 0.0)
        if rec["type"] == "energy":
            totals[rec["device"]] = totals.get(rec["device"], 0.0) + rec["energy"]
    return totals


def trace_to_text(trace: list[dict]) -> str:
    return "".join(json.dumps(rec, separators=(",", ":")) + "\n" for rec in trace)


def trace_from_text(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def compare(scenario: Scenario, seeds: Sequence[int]) -> list[SimMetrics]:
    """Both policies over the same seeds, sorted by (policy, seed)."""
    out = [run(scenario, s, policy=p)[0] for p in ("demccm", "direct") for s in seeds]
    out.sort(key=lambda m: (m.policy, m.seed))
    return out


DEVICE_COLUMNS = ["device", "energy", "search_energy", "handoffs", "completed",
                  "latency_p50", "latency_p95"]


@report_table.register
def _(m: SimMetrics):
    rows = [
        {
            "device": d,
            "energy": m.device_energy[d],
            "search_energy": m.search_energy[d],
            "handoffs": m.handoffs[d],
            "completed": m.completed[d],
            "latency_p50": m.latency_percentile(50, d),
            "latency_p95": m.latency_percentile(95, d),
        }
        for d in m.device_energy
    ]
    return list(DEVICE_COLUMNS), rows


COMPARISON_COLUMNS = ["policy", "seed", "total_energy", "search_energy", "latency_p50",
                      "latency_p95", "handoffs", "infeasible_routes", "completed", "unfinished"]


def comparison_table(metrics: Sequence[SimMetrics]) -> tuple[list[str], list[dict]]:
    """One row per (policy, seed), then one ``mean`` row per policy."""
    rows = []
    for m in sorted(metrics, key=lambda m: (m.policy, m.seed)):
        rows.append({
            "policy": m.policy,
            "seed": m.seed,
            "total_energy": m.total_energy,
            "search_energy": m.total_search_energy,
            "latency_p50": m.latency_percentile(50),
            "latency_p95": m.latency_percentile(95),
            "handoffs": m.total_handoffs,
            "infeasible_routes": m.infeasible_routes,
            "completed": len(m.latencies),
            "unfinished": m.unfinished,
        })
    for policy in sorted({m.policy for m in metrics}):
        mine = [r for r in rows if r["policy"] == policy]
        summary = {"policy": policy, "seed": "mean"}
        for col in COMPARISON_COLUMNS[2:]:
            summary[col] = float(np.mean([r[col] for r in mine]))
        rows.append(summary)
    return list(COMPARISON_COLUMNS), rows
