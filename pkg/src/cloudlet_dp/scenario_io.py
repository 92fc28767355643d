"""Problem and scenario documents, the Table-3 statistics reader, and report writers.

Problem (``.problem``) and scenario (``.scenario``) files are YAML documents
with an explicit ``schema_version``. Method options are written as
``[time, perf, energy]`` rows so a profile reads like the table it came from.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import singledispatch
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .dp_solver import FrontierRow, RouteSolution
from .errors import InvalidScenario, ParseError, ValidationError
from .route_model import ExecutionOption, MethodProfile, NodeSpec, RouteProblem

SCHEMA_VERSION = 1
POLICIES = ("demccm", "direct")
LINK_KINDS = ("wifi", "cellular")
RADIO_STATES = ("searching", "idle", "transmitting", "receiving")


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("cloudlet_dp") / "data" / name))


def _load_yaml(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ParseError(str(exc.problem or exc), line, col) from exc
    except yaml.YAMLError as exc:
        raise ParseError(str(exc)) from exc


def _dump_yaml(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, allow_unicode=True, width=100)


def _require(mapping: Any, key: str, path: str, cls=ValidationError):
    if not isinstance(mapping, dict):
        raise cls(f"expected a mapping, got {type(mapping).__name__}", path)
    if key not in mapping:
        raise cls(f"missing field {key!r}", path)
    return mapping[key]


def _number(value: Any, path: str, cls=ValidationError) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise cls(f"expected a number, got {value!r}", path)
    return value


def _integer(value: Any, path: str, cls=ValidationError) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise cls(f"expected an integer, got {value!r}", path)
    return value


def _schema(doc: Any, cls) -> None:
    version = _require(doc, "schema_version", "", cls)
    if version != SCHEMA_VERSION:
        raise cls(f"unsupported schema_version {version!r}", "schema_version")


# -- problems -----------------------------------------------------------------


def problem_from_dict(doc: Any, path: str = "") -> RouteProblem:
    def at(sub: str) -> str:
        return f"{path}.{sub}" if path else sub

    try:
        _schema(doc, ValidationError)
    except ValidationError as exc:
        raise exc.prefixed(path) if path else exc
    raw_nodes = _require(doc, "nodes", path)
    if not isinstance(raw_nodes, list):
        raise ValidationError("expected a list of nodes", at("nodes"))
    if not raw_nodes:
        raise ValidationError("a problem needs at least one node", at("nodes"))
    nodes = []
    for i, rn in enumerate(raw_nodes):
        npath = at(f"nodes[{i}]")
        node_id = str(_require(rn, "id", npath))
        raw_methods = _require(rn, "methods", npath)
        if not isinstance(raw_methods, list):
            raise ValidationError("expected a list of methods", f"{npath}.methods")
        methods = []
        for j, rm in enumerate(raw_methods):
            mpath = f"{npath}.methods[{j}]"
            method_id = str(_require(rm, "id", mpath))
            raw_opts = _require(rm, "options", mpath)
            if not isinstance(raw_opts, list):
                raise ValidationError("expected a list of [time, perf, energy] rows", f"{mpath}.options")
            opts = []
            for k, row in enumerate(raw_opts):
                opath = f"{mpath}.options[{k}]"
                if not isinstance(row, list) or len(row) != 3:
                    raise ValidationError("expected a [time, perf, energy] row", opath)
                try:
                    opts.append(ExecutionOption(row[0], row[1], row[2]))
                except ValidationError as exc:
                    raise exc.prefixed(opath) from None
            try:
                methods.append(MethodProfile(method_id, tuple(opts)))
            except ValidationError as exc:
                raise exc.prefixed(mpath) from None
        try:
            nodes.append(NodeSpec(node_id, tuple(methods)))
        except ValidationError as exc:
            raise exc.prefixed(npath) from None
    T = _integer(_require(doc, "time_constraint", path), at("time_constraint"))
    theta = _number(_require(doc, "confidence", path), at("confidence"))
    try:
        return RouteProblem(tuple(nodes), T, theta)
    except ValidationError as exc:
        raise (exc.prefixed(path) if path else exc) from None


def problem_to_dict(problem: RouteProblem) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "time_constraint": problem.time_constraint,
        "confidence": problem.confidence,
        "nodes": [
            {
                "id": node.node_id,
                "methods": [
                    {"id": m.method_id, "options": [[o.time, o.perf, o.energy] for o in m.options]}
                    for m in node.methods
                ],
            }
            for node in problem.nodes
        ],
    }


def parse_problem(text: str) -> RouteProblem:
    return problem_from_dict(_load_yaml(text))


def serialize_problem(problem: RouteProblem) -> str:
    return _dump_yaml(problem_to_dict(problem))


def load_problem(path: str | Path) -> RouteProblem:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


# -- Table-3 style statistics ---------------------------------------------------

_PAIR = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


@dataclass(frozen=True)
class Table3Stats:
    """Per-row (latency index, energy) cells, keyed by the row label ``T``.

    Values are kept as Decimals so the printed digits survive a round trip;
    the latency index may exceed 1 and is never read as a probability.
    """

    rows: dict[int, tuple[tuple[Decimal, Decimal], ...]] = field(default_factory=dict)

    def pairs(self, row: int) -> list[tuple[float, float]]:
        return [(float(p), float(e)) for p, e in self.rows[row]]

    def __len__(self):
        return len(self.rows)


def load_table3_stats(text: str) -> Table3Stats:
    rows: dict[int, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line in ("⋮", "..."):
            continue
        head, _, rest = line.partition(" ") if "\t" not in line else line.partition("\t")
        try:
            label = int(head)
        except ValueError:
            raise ParseError(f"row label {head!r} is not an integer", lineno, 1) from None
        if label in rows:
            raise ParseError(f"duplicate row {label}", lineno, 1)
        cells = []
        pos = 0
        rest = rest.strip()
        for m in _PAIR.finditer(rest):
            if rest[pos:m.start()].strip():
                raise ParseError(f"unexpected text {rest[pos:m.start()].strip()!r}", lineno,
                                 raw.find(rest) + pos + 1)
            try:
                cells.append((Decimal(m.group(1)), Decimal(m.group(2))))
            except InvalidOperation:
                raise ParseError(f"bad number in {m.group(0)!r}", lineno, raw.find(m.group(0)) + 1) from None
            pos = m.end()
        if rest[pos:].strip():
            raise ParseError(f"unexpected text {rest[pos:].strip()!r}", lineno, raw.find(rest) + pos + 1)
        rows[label] = tuple(cells)
    return Table3Stats(rows)


def serialize_table3_stats(stats: Table3Stats) -> str:
    lines = []
    for label in sorted(stats.rows):
        cells = "\t".join(f"({p},{e})" for p, e in stats.rows[label])
        lines.append(f"{label}\t{cells}" if cells else str(label))
    return "\n".join(lines) + ("\n" if lines else "")


# -- scenarios ------------------------------------------------------------------


@dataclass(frozen=True)
class LinkModel:
    link_id: str
    kind: str
    bandwidth: float
    base_latency: int
    per_unit_cost: float = 0.0
    stability: float = 1.0

    def __post_init__(self):
        if self.kind not in LINK_KINDS:
            raise InvalidScenario(f"unknown link kind {self.kind!r}", "kind")
        if not self.bandwidth > 0:
            raise InvalidScenario("bandwidth must be > 0", "bandwidth")
        if self.base_latency < 0:
            raise InvalidScenario("base_latency must be >= 0", "base_latency")
        if self.per_unit_cost < 0:
            raise InvalidScenario("per_unit_cost must be >= 0", "per_unit_cost")
        if not (0 < self.stability <= 1):
            raise InvalidScenario("stability must lie in (0, 1]", "stability")


@dataclass(frozen=True)
class PowerTable:
    searching: float = 2.0
    idle: float = 0.1
    transmitting: float = 3.0
    receiving: float = 1.5
    computing: float = 2.5

    def __post_init__(self):
        for name in ("searching", "idle", "transmitting", "receiving", "computing"):
            if not getattr(self, name) > 0:
                raise InvalidScenario("power must be > 0", name)

    def power(self, state: str) -> float:
        return getattr(self, state)


@dataclass(frozen=True)
class AppSpec:
    input_size: float
    output_size: float
    work: float
    partitionable: bool = True

    def __post_init__(self):
        for name in ("input_size", "output_size"):
            if getattr(self, name) < 0:
                raise InvalidScenario("size must be >= 0", name)
        if not self.work > 0:
            raise InvalidScenario("work must be > 0", "work")


@dataclass(frozen=True)
class DeviceSpec:
    device_id: str
    waypoints: tuple[tuple[int, float, float], ...]
    direct_link: str
    app: AppSpec
    power: PowerTable = PowerTable()
    capability: float = 1.0
    offload: str = "enabled"
    request_interval: int = 10
    first_request: int = 0

    def __post_init__(self):
        if not self.waypoints:
            raise InvalidScenario("at least one waypoint is required", "waypoints")
        for i in range(1, len(self.waypoints)):
            if self.waypoints[i][0] <= self.waypoints[i - 1][0]:
                raise InvalidScenario("waypoint ticks must be strictly increasing", f"waypoints[{i}]")
        if not self.capability > 0:
            raise InvalidScenario("capability must be > 0", "capability")
        if self.offload not in ("enabled", "disabled"):
            raise InvalidScenario(f"offload must be enabled or disabled, got {self.offload!r}", "offload")
        if self.request_interval < 1:
            raise InvalidScenario("request_interval must be >= 1", "request_interval")
        if self.first_request < 0:
            raise InvalidScenario("first_request must be >= 0", "first_request")


@dataclass(frozen=True)
class ServerRoute:
    server_id: str
    problem: RouteProblem


@dataclass(frozen=True)
class CloudletSpec:
    cloudlet_id: str
    position: tuple[float, float]
    access_link: str
    servers: tuple[ServerRoute, ...]
    stats_row: int | None = None

    def __post_init__(self):
        if not self.servers:
            raise InvalidScenario("a cloudlet needs at least one server route", "servers")


@dataclass(frozen=True)
class Scenario:
    devices: tuple[DeviceSpec, ...]
    cloudlets: tuple[CloudletSpec, ...]
    links: tuple[LinkModel, ...]
    horizon: int
    policy: str = "demccm"
    hysteresis: float = 0.1
    energy_weight: float = 0.5
    latency_weight: float = 0.5
    latency_per_distance: float = 1.0
    search_duration: int = 5
    cloud_service_time: int = 2
    cloudlet_service_time: int = 1
    service_scale: float = 10.0
    table3: Table3Stats | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidScenario("horizon must be >= 1", "horizon")
        if self.policy not in POLICIES:
            raise InvalidScenario(f"unknown policy {self.policy!r}", "policy")
        if self.hysteresis < 0:
            raise InvalidScenario("hysteresis must be >= 0", "hysteresis")
        for name in ("energy_weight", "latency_weight", "latency_per_distance", "service_scale"):
            if getattr(self, name) < 0:
                raise InvalidScenario("must be >= 0", name)
        for name in ("search_duration", "cloud_service_time", "cloudlet_service_time"):
            if getattr(self, name) < 0:
                raise InvalidScenario("must be >= 0", name)
        for kind, items, attr in (("device", self.devices, "device_id"),
                                  ("cloudlet", self.cloudlets, "cloudlet_id"),
                                  ("link", self.links, "link_id")):
            seen = set()
            for i, item in enumerate(items):
                key = getattr(item, attr)
                if key in seen:
                    raise InvalidScenario(f"duplicate {kind} id {key!r}", f"{kind}s[{i}].id")
                seen.add(key)
        links = {l.link_id for l in self.links}
        for i, d in enumerate(self.devices):
            if d.direct_link not in links:
                raise InvalidScenario(f"unknown link {d.direct_link!r}", f"devices[{i}].direct_link")
        for i, c in enumerate(self.cloudlets):
            if c.access_link not in links:
                raise InvalidScenario(f"unknown link {c.access_link!r}", f"cloudlets[{i}].access_link")
            if c.stats_row is not None:
                if self.table3 is None or c.stats_row not in self.table3.rows:
                    raise InvalidScenario(f"unknown statistics row {c.stats_row!r}",
                                          f"cloudlets[{i}].stats_row")
                if not self.table3.rows[c.stats_row]:
                    raise InvalidScenario(f"statistics row {c.stats_row} is empty",
                                          f"cloudlets[{i}].stats_row")
        if self.policy == "demccm" and self.devices and not self.cloudlets:
            raise InvalidScenario("the demccm policy needs at least one cloudlet", "cloudlets")

    def link(self, link_id: str) -> LinkModel:
        for l in self.links:
            if l.link_id == link_id:
                return l
        raise KeyError(link_id)


def _build(cls, path: str, **kwargs):
    try:
        return cls(**kwargs)
    except InvalidScenario as exc:
        raise exc.prefixed(path) from None
    except ValidationError as exc:
        raise InvalidScenario(exc.message, exc.path).prefixed(path) from None
    except TypeError as exc:
        raise InvalidScenario(str(exc), path) from None


def _opt(raw: dict, key: str, default, path: str, kind=float):
    if key not in raw:
        return default
    value = raw[key]
    if kind is int:
        return _integer(value, path, InvalidScenario)
    if kind is bool:
        if not isinstance(value, bool):
            raise InvalidScenario(f"expected true/false, got {value!r}", path)
        return value
    if kind is str:
        return str(value)
    return _number(value, path, InvalidScenario)


def scenario_from_dict(doc: Any, base_dir: Path | None = None) -> Scenario:
    _schema(doc, InvalidScenario)
    table3 = None
    if "table3" in doc:
        try:
            table3 = load_table3_stats(str(doc["table3"]))
        except ParseError as exc:
            raise InvalidScenario(str(exc), "table3") from None
    elif "table3_file" in doc:
        table3 = load_table3_stats(_resolve(doc["table3_file"], base_dir, "table3_file").read_text(encoding="utf-8"))

    links = []
    for i, rl in enumerate(_list(doc, "links")):
        p = f"links[{i}]"
        links.append(_build(
            LinkModel, p,
            link_id=str(_require(rl, "id", p, InvalidScenario)),
            kind=str(_require(rl, "kind", p, InvalidScenario)),
            bandwidth=_number(_require(rl, "bandwidth", p, InvalidScenario), f"{p}.bandwidth", InvalidScenario),
            base_latency=_integer(_require(rl, "base_latency", p, InvalidScenario), f"{p}.base_latency", InvalidScenario),
            per_unit_cost=_opt(rl, "per_unit_cost", 0.0, f"{p}.per_unit_cost"),
            stability=_opt(rl, "stability", 1.0, f"{p}.stability"),
        ))

    devices = []
    for i, rd in enumerate(_list(doc, "devices")):
        p = f"devices[{i}]"
        raw_wp = _require(rd, "waypoints", p, InvalidScenario)
        if not isinstance(raw_wp, list):
            raise InvalidScenario("expected a list of [tick, x, y] rows", f"{p}.waypoints")
        wps = []
        for k, w in enumerate(raw_wp):
            wp = f"{p}.waypoints[{k}]"
            if not isinstance(w, list) or len(w) != 3:
                raise InvalidScenario("expected a [tick, x, y] row", wp)
            wps.append((_integer(w[0], wp, InvalidScenario), _number(w[1], wp, InvalidScenario),
                        _number(w[2], wp, InvalidScenario)))
        ra = _require(rd, "app", p, InvalidScenario)
        ap = f"{p}.app"
        app = _build(
            AppSpec, ap,
            input_size=_number(_require(ra, "input_size", ap, InvalidScenario), f"{ap}.input_size", InvalidScenario),
            output_size=_number(_require(ra, "output_size", ap, InvalidScenario), f"{ap}.output_size", InvalidScenario),
            work=_number(_require(ra, "work", ap, InvalidScenario), f"{ap}.work", InvalidScenario),
            partitionable=_opt(ra, "partitionable", True, f"{ap}.partitionable", bool),
        )
        rp = rd.get("power", {}) or {}
        pp = f"{p}.power"
        if not isinstance(rp, dict):
            raise InvalidScenario("expected a mapping of state -> power", pp)
        unknown = set(rp) - set(PowerTable.__dataclass_fields__)
        if unknown:
            raise InvalidScenario(f"unknown power state {sorted(unknown)[0]!r}", pp)
        power = _build(PowerTable, pp, **{k: _number(v, f"{pp}.{k}", InvalidScenario) for k, v in rp.items()})
        ddf = DeviceSpec.__dataclass_fields__
        devices.append(_build(
            DeviceSpec, p,
            device_id=str(_require(rd, "id", p, InvalidScenario)),
            waypoints=tuple(wps),
            direct_link=str(_require(rd, "direct_link", p, InvalidScenario)),
            app=app,
            power=power,
            capability=_opt(rd, "capability", ddf["capability"].default, f"{p}.capability"),
            offload=_opt(rd, "offload", ddf["offload"].default, f"{p}.offload", str),
            request_interval=_opt(rd, "request_interval", ddf["request_interval"].default, f"{p}.request_interval", int),
            first_request=_opt(rd, "first_request", ddf["first_request"].default, f"{p}.first_request", int),
        ))

    cloudlets = []
    for i, rc in enumerate(_list(doc, "cloudlets")):
        p = f"cloudlets[{i}]"
        pos = _require(rc, "position", p, InvalidScenario)
        if not isinstance(pos, list) or len(pos) != 2:
            raise InvalidScenario("expected an [x, y] position", f"{p}.position")
        servers = []
        raw_servers = _require(rc, "servers", p, InvalidScenario)
        if not isinstance(raw_servers, list):
            raise InvalidScenario("expected a list of server routes", f"{p}.servers")
        for k, rs in enumerate(raw_servers):
            sp = f"{p}.servers[{k}]"
            sid = str(_require(rs, "id", sp, InvalidScenario))
            try:
                if "problem" in rs:
                    problem = problem_from_dict(rs["problem"], f"{sp}.problem")
                else:
                    src = _resolve(_require(rs, "problem_file", sp, InvalidScenario), base_dir, f"{sp}.problem_file")
                    problem = problem_from_dict(_load_yaml(src.read_text(encoding="utf-8")), f"{sp}.problem")
                    overrides = {}
                    if "time_constraint" in rs:
                        overrides["time_constraint"] = _integer(rs["time_constraint"], f"{sp}.time_constraint", InvalidScenario)
                    if "confidence" in rs:
                        overrides["confidence"] = _number(rs["confidence"], f"{sp}.confidence", InvalidScenario)
                    problem = problem.with_constraints(**overrides)
            except InvalidScenario:
                raise
            except ValidationError as exc:
                raise InvalidScenario(exc.message, exc.path) from None
            servers.append(ServerRoute(sid, problem))
        stats_row = rc.get("stats_row")
        if stats_row is not None:
            stats_row = _integer(stats_row, f"{p}.stats_row", InvalidScenario)
        cloudlets.append(_build(
            CloudletSpec, p,
            cloudlet_id=str(_require(rc, "id", p, InvalidScenario)),
            position=(_number(pos[0], f"{p}.position", InvalidScenario),
                      _number(pos[1], f"{p}.position", InvalidScenario)),
            access_link=str(_require(rc, "access_link", p, InvalidScenario)),
            servers=tuple(servers),
            stats_row=stats_row,
        ))

    kwargs = {}
    for name in ("policy",):
        if name in doc:
            kwargs[name] = str(doc[name])
    for name in ("hysteresis", "energy_weight", "latency_weight", "latency_per_distance", "service_scale"):
        if name in doc:
            kwargs[name] = _number(doc[name], name, InvalidScenario)
    for name in ("search_duration", "cloud_service_time", "cloudlet_service_time"):
        if name in doc:
            kwargs[name] = _integer(doc[name], name, InvalidScenario)
    horizon = _integer(_require(doc, "horizon", "", InvalidScenario), "horizon", InvalidScenario)
    return _build(
        Scenario, "",
        devices=tuple(devices), cloudlets=tuple(cloudlets), links=tuple(links),
        horizon=horizon, table3=table3, **kwargs,
    )


def _list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if value is None:
        return []
    if not isinstance(value, list):
        raise InvalidScenario("expected a list", key)
    return value


def _resolve(name: Any, base_dir: Path | None, path: str) -> Path:
    name = str(name)
    candidates = []
    if base_dir is not None:
        candidates.append(Path(base_dir) / name)
    candidates.append(Path(name))
    candidates.append(bundled_path(name))
    for c in candidates:
        if c.is_file():
            return c
    raise InvalidScenario(f"file {name!r} not found", path)


def scenario_to_dict(sc: Scenario) -> dict:
    doc: dict = {"schema_version": sc.schema_version, "horizon": sc.horizon, "policy": sc.policy}
    for name in ("hysteresis", "energy_weight", "latency_weight", "latency_per_distance",
                 "search_duration", "cloud_service_time", "cloudlet_service_time", "service_scale"):
        doc[name] = getattr(sc, name)
    doc["links"] = [
        {"id": l.link_id, "kind": l.kind, "bandwidth": l.bandwidth, "base_latency": l.base_latency,
         "per_unit_cost": l.per_unit_cost, "stability": l.stability}
        for l in sc.links
    ]
    doc["cloudlets"] = []
    for c in sc.cloudlets:
        rc = {"id": c.cloudlet_id, "position": list(c.position), "access_link": c.access_link,
              "servers": [{"id": s.server_id, "problem": problem_to_dict(s.problem)} for s in c.servers]}
        if c.stats_row is not None:
            rc["stats_row"] = c.stats_row
        doc["cloudlets"].append(rc)
    doc["devices"] = [
        {
            "id": d.device_id,
            "waypoints": [list(w) for w in d.waypoints],
            "direct_link": d.direct_link,
            "capability": d.capability,
            "offload": d.offload,
            "request_interval": d.request_interval,
            "first_request": d.first_request,
            "app": {"input_size": d.app.input_size, "output_size": d.app.output_size,
                    "work": d.app.work, "partitionable": d.app.partitionable},
            "power": {k: getattr(d.power, k) for k in PowerTable.__dataclass_fields__},
        }
        for d in sc.devices
    ]
    if sc.table3 is not None:
        doc["table3"] = serialize_table3_stats(sc.table3)
    return doc


def parse_scenario(text: str, base_dir: Path | None = None) -> Scenario:
    doc = _load_yaml(text)
    if not isinstance(doc, dict):
        raise InvalidScenario("a scenario must be a mapping")
    return scenario_from_dict(doc, base_dir)


def serialize_scenario(sc: Scenario) -> str:
    return _dump_yaml(scenario_to_dict(sc))


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        path = bundled_path(path.name) if bundled_path(path.name).is_file() else path
    return parse_scenario(path.read_text(encoding="utf-8"), path.parent)


# -- reports ----------------------------------------------------------------------


def fmt_float(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.6g}"


def format_allotments(allotments) -> str:
    return ";".join(f"{a.node_id}:{a.method_id}@{a.time}" for a in allotments)


@singledispatch
def report_table(obj) -> tuple[list[str], list[dict]]:
    """Column names and row records for anything that can be reported."""
    if isinstance(obj, list) and (not obj or isinstance(obj[0], FrontierRow)):
        cols = ["t", "perf", "energy", "assignment"]
        return cols, [{"t": r.t, "perf": r.perf, "energy": r.energy,
                       "assignment": format_allotments(r.allotments)} for r in obj]
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], list):
        return obj
    raise TypeError(f"cannot report {type(obj).__name__}")


@report_table.register
def _(obj: RouteSolution):
    cols = ["perf", "energy", "time_used", "assignment"]
    return cols, [{"perf": obj.achieved.perf, "energy": obj.achieved.energy,
                   "time_used": obj.time_used, "assignment": format_allotments(obj.allotments)}]


def write_report(obj, fmt: str = "csv") -> str:
    cols, rows = report_table(obj)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt_float(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
        return buf.getvalue()
    if fmt in ("json", "json-lines", "jsonl"):
        # json keeps full float precision so values parse back unchanged
        return "".join(json.dumps({c: r[c] for c in cols}) + "\n" for r in rows)
    raise ValueError(f"unknown report format {fmt!r}")
