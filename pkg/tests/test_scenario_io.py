import json
import random
import re

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from cloudlet_dp.dp_solver import full_frontier, solve
from cloudlet_dp.errors import InvalidScenario, ParseError, ValidationError
from cloudlet_dp.scenario_io import (
    bundled_path,
    load_scenario,
    load_table3_stats,
    parse_problem,
    parse_scenario,
    serialize_problem,
    serialize_scenario,
    serialize_table3_stats,
    write_report,
)

from conftest import random_problem

# Expected rows: node, then (T, P, E) for M1 and M2 on two lines each.
TABLE4_PRINTED = """\
0 1 0.7 7 2 0.6 6
0 2 0.1 7 3 0.2 6
1 1 0.8 6 2 0.7 3
1 2 0.3 6 3 0.3 3
2 1 0.8 9 2 0.8 4
2 3 0.2 9 4 0.2 4
3 2 0.7 8 5 0.8 5
3 3 0.3 8 7 0.3 5
4 2 0.6 7 4 0.8 6
4 5 0.4 7 5 0.2 6
5 1 0.7 8 2 0.7 2
5 3 0.3 8 4 0.3 2
7 1 0.8 6 3 0.8 3
7 4 0.4 6 5 0.2 3
"""

TABLE3_PRINTED = """\
1 (0.163,44.0)
2 (0.226,54.0) (0.219,54.0) (0.122,41.0)
3 (0.226,50.0) (0.134,39.0) (0.232,54.0) (0.114,44.0) (0.210,59.0)
4 (0.237,39.0) (0.335,44.0) (0.317,58.0) (0.19,44.0) (0.229,49.0)
5 (0.357,50.0) (0.348,44.0) (0.229,46.0) (0.445,56.0) (0.356,49.0)
6 (0.360,49.0) (0.437,58.0) (0.445,44.0) (0.267,36.0) (0.349,42.0)
7 (0.59,51.0) (0.469,42.0) (0.478,49.0) (0.378,78.0) (0.429,47.0)
8 (0.176,33.0) (0.416,48.0) (0.57,41.0) (0.526,46.0) (0.283,33.0)
23 (0.781,23.0) (1.03,31.0) (0.5,24.0)
24 (0.89,22.0) (1.9,21.0) (1.2,37.0)
25 (0.83,27.0) (1.1,35.0) (1.2,28.0)
"""


def table4_text():
    return bundled_path("table4.problem").read_text()


def test_table4_fixture_values(table4):
    assert [n.node_id for n in table4.nodes] == ["0", "1", "2", "3", "4", "5", "7"]
    assert all(len(n.methods) == 2 for n in table4.nodes)
    assert table4.node("0").method("M1").options[0].perf == 0.7
    assert table4.node("0").method("M1").energy == 7


def test_table4_reserializes_digit_for_digit(table4):
    doc = yaml.safe_load(serialize_problem(table4))
    lines = []
    for node in doc["nodes"]:
        m1, m2 = (m["options"] for m in node["methods"])
        for a, b in zip(m1, m2):
            lines.append(" ".join([node["id"], *map(str, a), *map(str, b)]))
    assert "\n".join(lines) + "\n" == TABLE4_PRINTED


def test_rejects_perf_above_one():
    doc = yaml.safe_load(table4_text())
    doc["nodes"][2]["methods"][1]["options"][0][1] = 1.9
    with pytest.raises(ValidationError) as info:
        parse_problem(yaml.safe_dump(doc))
    assert info.value.path == "nodes[2].methods[1].options[0].perf"


def test_rejects_empty_nodes():
    with pytest.raises(ValidationError) as info:
        parse_problem("schema_version: 1\ntime_constraint: 3\nconfidence: 0.5\nnodes: []\n")
    assert info.value.path == "nodes"


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_problem("schema_version: 1\nnodes: [\n  - id: 0\n")
    assert info.value.line is not None and info.value.column is not None


def test_unknown_schema_version():
    with pytest.raises(ValidationError, match="schema_version"):
        parse_problem(table4_text().replace("schema_version: 1", "schema_version: 2"))


MUTATIONS = [
    (lambda d: d["nodes"][0]["methods"][0]["options"][0].__setitem__(1, -0.1), "nodes[0].methods[0].options[0].perf"),
    (lambda d: d["nodes"][1]["methods"][0]["options"][1].__setitem__(1, 1.5), "nodes[1].methods[0].options[1].perf"),
    (lambda d: d["nodes"][0]["methods"][1]["options"][0].__setitem__(0, 0), "nodes[0].methods[1].options[0].time"),
    (lambda d: d["nodes"][3]["methods"][0]["options"][1].__setitem__(0, 2), "nodes[3].methods[0].options[1].time"),
    (lambda d: d["nodes"][2]["methods"][0]["options"][0].__setitem__(2, -3), "nodes[2].methods[0].options[0].energy"),
    (lambda d: d["nodes"][2]["methods"][0]["options"][1].__setitem__(2, 10), "nodes[2].methods[0].options[1].energy"),
    (lambda d: d["nodes"][4]["methods"][0]["options"].clear(), "nodes[4].methods[0].options"),
    (lambda d: d["nodes"][5]["methods"].clear(), "nodes[5].methods"),
    (lambda d: d["nodes"][5]["methods"][1].__setitem__("id", "M1"), "nodes[5].methods[1].id"),
    (lambda d: d["nodes"][6].__setitem__("id", "0"), "nodes[6].id"),
    (lambda d: d.__setitem__("time_constraint", 0), "time_constraint"),
    (lambda d: d.__setitem__("time_constraint", 4), "time_constraint"),
    (lambda d: d.__setitem__("confidence", 1.5), "confidence"),
    (lambda d: d.__setitem__("confidence", 0), "confidence"),
    (lambda d: d["nodes"][0]["methods"][0]["options"][0].__setitem__(1, "high"), "nodes[0].methods[0].options[0].perf"),
    (lambda d: d["nodes"][0]["methods"][0]["options"].append([9, 0.1]), "nodes[0].methods[0].options[2]"),
]


@pytest.mark.parametrize("mutate, path", MUTATIONS)
def test_every_invariant_violation_is_rejected_with_path(mutate, path):
    doc = yaml.safe_load(table4_text())
    mutate(doc)
    with pytest.raises(ValidationError) as info:
        parse_problem(yaml.safe_dump(doc))
    assert info.value.path == path


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_problem_round_trip(seed):
    p = random_problem(random.Random(seed))
    assert parse_problem(serialize_problem(p)) == p


def test_table3_rows():
    stats = load_table3_stats(bundled_path("table3.txt").read_text())
    assert stats.pairs(1) == [(0.163, 44.0)]
    assert stats.pairs(24) == [(0.89, 22.0), (1.9, 21.0), (1.2, 37.0)]
    assert sorted(stats.rows) == [1, 2, 3, 4, 5, 6, 7, 8, 23, 24, 25]
    assert len(load_table3_stats("")) == 0


def test_table3_reserializes_digit_for_digit():
    stats = load_table3_stats(bundled_path("table3.txt").read_text())
    text = serialize_table3_stats(stats).replace("\t", " ")
    assert text == TABLE3_PRINTED
    assert load_table3_stats(text) == stats


def test_table3_accepts_ellipsis_and_rejects_garbage():
    assert len(load_table3_stats("1 (0.1,2.0)\n⋮\n23 (1.5,3.0)\n")) == 2
    with pytest.raises(ParseError) as info:
        load_table3_stats("1 (0.1,2.0)\n2 (0.1,2.0) junk\n")
    assert info.value.line == 2


@pytest.mark.parametrize("name", ["unstable.scenario", "static.scenario", "mobile.scenario"])
def test_scenario_round_trip(name):
    sc = load_scenario(bundled_path(name))
    text = serialize_scenario(sc)
    assert parse_scenario(text) == sc
    assert serialize_scenario(parse_scenario(text)) == text


def scenario_doc():
    return yaml.safe_load(serialize_scenario(load_scenario(bundled_path("unstable.scenario"))))


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d["devices"][0].__setitem__("direct_link", "nope"), "devices[0].direct_link"),
    (lambda d: d["cloudlets"][1].__setitem__("access_link", "nope"), "cloudlets[1].access_link"),
    (lambda d: d["cloudlets"][0].__setitem__("stats_row", 12), "cloudlets[0].stats_row"),
    (lambda d: d.__setitem__("horizon", 0), "horizon"),
    (lambda d: d.__setitem__("policy", "fastest"), "policy"),
    (lambda d: d["links"][1].__setitem__("stability", 0), "links[1].stability"),
    (lambda d: d["links"][0].__setitem__("bandwidth", 0), "links[0].bandwidth"),
    (lambda d: d["devices"][1]["power"].__setitem__("idle", 0), "devices[1].power.idle"),
    (lambda d: d["cloudlets"][0]["servers"][0]["problem"]["nodes"][0]["methods"][0]["options"][0].__setitem__(1, 1.9),
     "cloudlets[0].servers[0].problem.nodes[0].methods[0].options[0].perf"),
    (lambda d: d["cloudlets"][0].__setitem__("servers", []), "cloudlets[0].servers"),
    (lambda d: d["devices"][2].__setitem__("id", "d1"), "devices[2].id"),
])
def test_scenario_rejections(mutate, path):
    doc = scenario_doc()
    mutate(doc)
    with pytest.raises(InvalidScenario) as info:
        parse_scenario(yaml.safe_dump(doc))
    assert info.value.path == path


def test_report_formats(node0, table4):
    sol = solve(node0)
    csv_text = write_report(sol, "csv")
    assert csv_text == "perf,energy,time_used,assignment\n0.8,7,2,0:M1@2\n"
    [row] = [json.loads(l) for l in write_report(sol, "json").splitlines()]
    assert row["perf"] == sol.achieved.perf

    rows = full_frontier(table4)
    text = write_report(rows, "csv")
    assert text.splitlines()[0] == "t,perf,energy,assignment"
    assert len(text.splitlines()) == len(rows) + 1
    assert write_report(rows, "csv") == text
    # six significant digits
    assert all(len(re.sub(r"[^0-9]", "", line.split(",")[1]).lstrip("0")) <= 6
               for line in text.splitlines()[1:])


def test_empty_frontier_report_is_header_only():
    assert write_report([], "csv") == "t,perf,energy,assignment\n"
    assert write_report([], "json") == ""
    with pytest.raises(ValueError):
        write_report([], "xml")
