import copy
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_protocol, random_taxonomy
from protorel import ActInstance, ProtocolError, change_init, enumerate_branches, load_protocol, prune
from protorel.protocol import concat, protocol_from_branches
from scenarios import DATA, protocol, taxonomy


def _doc(name):
    return json.loads((DATA / name).read_text())


def _codes(doc, t=None):
    with pytest.raises(ProtocolError) as info:
        load_protocol(doc, t)
    return info.value.codes


def test_asktime_shape():
    p = protocol("asktime", "asktime")
    assert len(p.states) == 4 and p.finals == {"D"}
    assert len(p.transitions) == 3


def test_hospital_p2_shape():
    p = protocol("hospital", "p2")
    assert len(p.states) == 10
    assert p.finals == {"D", "G", "J"}


def test_cycle_rejected():
    assert "cycle-detected" in _codes(_doc("bad_cyclic.json"))


def test_structural_errors():
    base = _doc("asktime/asktime.json")

    doc = copy.deepcopy(base)
    doc["transitions"].append({"from": "A", "to": "C", "act": dict(doc["transitions"][0]["act"])})
    assert "nondeterministic-transition" in _codes(doc)

    doc = copy.deepcopy(base)
    doc["states"].append("Z")
    assert "unreachable-state" in _codes(doc)

    doc = copy.deepcopy(base)
    doc["finals"] = []
    assert "no-final-state" in _codes(doc)

    doc = copy.deepcopy(base)
    doc["states"].append("E")
    doc["transitions"].append({"from": "B", "to": "E", "act": {"class": "X", "sender": "A", "receiver": "B", "content": "c"}})
    assert "dead-end-state" in _codes(doc)

    doc = copy.deepcopy(base)
    doc["initial"] = "Q"
    assert "unknown-state" in _codes(doc)

    doc = copy.deepcopy(base)
    doc["owner"] = "me"
    assert "schema" in _codes(doc)


def test_taxonomy_checks():
    t = taxonomy("asktime")
    doc = _doc("asktime/asktime.json")
    doc["transitions"][0]["act"]["class"] = "Shout"
    assert "unknown-act-class" in _codes(doc, t)

    doc = _doc("asktime/asktime.json")
    doc["transitions"][0]["act"]["content"] = "Weather"
    assert "unknown-content-class" in _codes(doc, t)

    doc = _doc("asktime/asktime.json")
    del doc["transitions"][2]["act"]["inReplyToContent"]
    assert "missing-in-reply-to" in _codes(doc, t)

    doc = _doc("asktime/asktime.json")
    doc["transitions"][0]["act"]["inReplyToContent"] = "TimeReq"
    assert "unexpected-in-reply-to" in _codes(doc, t)


def test_all_problems_are_reported_together():
    doc = _doc("asktime/asktime.json")
    doc["transitions"][0]["act"]["class"] = "Shout"
    doc["transitions"][1]["act"]["content"] = "Weather"
    codes = _codes(doc, taxonomy("asktime"))
    assert {"unknown-act-class", "unknown-content-class"} <= set(codes)


def test_prune_and_change_init_on_scenario_branch():
    b23 = enumerate_branches(protocol("hospital", "p2"))[2]
    assert str(b23) == "[A,B,C,E,F,H,I,J]"
    assert str(prune(b23, 3)) == "[A,B,C,E]"
    assert str(change_init(b23, 3)) == "[E,F,H,I,J]"
    assert prune(b23, len(b23)) == b23
    assert len(prune(b23, 0)) == 0 and prune(b23, 0).states == ["A"]
    assert change_init(b23, 0) == b23
    assert len(change_init(b23, len(b23))) == 0
    for k in range(len(b23) + 1):
        assert concat(prune(b23, k), change_init(b23, k)) == b23
    with pytest.raises(IndexError):
        prune(b23, len(b23) + 1)
    with pytest.raises(IndexError):
        change_init(b23, -1)


def test_round_trip_of_shipped_protocols():
    for scenario, name in [("asktime", "asktime"), ("hospital", "p1"), ("hospital", "p2"), ("weather", "p1"), ("weather", "p2")]:
        p = protocol(scenario, name)
        assert load_protocol(json.dumps(p.to_json()), taxonomy(scenario)) == p


def test_protocol_from_branches_rejects_clashing_acts():
    a1 = ActInstance("Assert", "a", "b", "fa")
    a2 = ActInstance("Assert", "a", "b", "fb")
    with pytest.raises(ProtocolError) as info:
        protocol_from_branches("X", [[a1], [a2]])
    assert info.value.codes == ["nondeterministic-transition"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_round_trip_and_partition(seed):
    rng = random.Random(seed)
    t = random_taxonomy(rng)
    p = random_protocol(rng, t)
    assert load_protocol(p.to_json(), t) == p
    for b in enumerate_branches(p):
        for k in range(len(b) + 1):
            assert concat(prune(b, k), change_init(b, k)) == b
