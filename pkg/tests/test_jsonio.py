import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gsmalleable import jsonio
from gsmalleable.core import (Assignment, ExplicitMatroid, ExplicitTable, Instance, LinearShift, LinearSpeed,
                              ValidationError, WeightedMatroidRank)
from gsmalleable.gen import PROFILES, generate, generate_mmfa
from gsmalleable.schedule import build_schedule

F = Fraction


@given(st.integers(0, 10 ** 5), st.sampled_from(PROFILES))
def test_instance_roundtrip(seed, profile):
    inst = generate(seed, profile)
    obj = jsonio.emit_instance(inst)
    back = jsonio.parse_instance(json.loads(jsonio.dumps(obj)))
    assert back == inst
    assert jsonio.digest(obj) == jsonio.digest(jsonio.emit_instance(back))


@given(st.integers(0, 10 ** 5))
def test_mmfa_roundtrip(seed):
    mm = generate_mmfa(seed)
    back = jsonio.parse_mmfa(json.loads(jsonio.dumps(jsonio.emit_mmfa(mm))))
    assert back.utilities == mm.utilities and back.items == mm.items


def test_other_speed_types_roundtrip():
    ground = ("a", "b")
    table = ExplicitTable((F(0), F(1), F(1), F(3, 2)))
    shift = LinearShift(LinearSpeed((F(2), F(1))), (F(1, 2), F(0)))
    expl = WeightedMatroidRank(ExplicitMatroid(2, (0b01, 0b10)), (F(1), F(2)))
    for fn in (table, shift, expl):
        assert jsonio.parse_speed(jsonio.emit_speed(fn, ground), ground) == fn
    assert jsonio.emit_speed(table, ground) == {"type": "explicit_table", "values": [0, 1, 1, "3/2"]}


def _doc(speed):
    return {"machines": ["a", "b"], "jobs": [{"id": "j", "speed": speed}]}


@pytest.mark.parametrize("doc", [
    {"machines": ["a"]},
    {"machines": ["a"], "jobs": [], "extra": 1},
    _doc({"type": "linear", "weights": {"a": 1.5}}),
    _doc({"type": "linear", "weights": {"c": 1}}),
    _doc({"type": "linear", "weights": {"a": 1}, "rank": 2}),
    _doc({"type": "quadratic", "weights": {}}),
    _doc({"type": "weighted_matroid_rank", "matroid": {"type": "uniform", "rank": "2"}, "weights": {}}),
    _doc({"type": "weighted_matroid_rank", "matroid": {"type": "partition", "blocks": [["a", "a"]],
                                                       "capacities": [1]}, "weights": {"a": 1}}),
    _doc({"type": "explicit_table", "values": [0, 1, 1]}),
    _doc({"type": "matroid_based_valuation", "slots": ["s", "s"], "slot_matroid": {"type": "free"}, "weights": {}}),
    {"machines": ["a", 3], "jobs": []},
    {"machines": ["a"], "jobs": [{"id": 7, "speed": {"type": "linear", "weights": {"a": 1}}}]},
])
def test_invalid_documents_rejected(doc):
    with pytest.raises(ValidationError):
        jsonio.parse_instance(doc)


def test_assignment_roundtrip_and_errors():
    inst = Instance.build(["a", "b"], [("x", LinearSpeed((F(1), F(1)))), ("y", LinearSpeed((F(1), F(0))))])
    a = Assignment((0b11, 0b01))
    obj = jsonio.emit_assignment(a, inst)
    assert obj == {"x": ["a", "b"], "y": ["a"]}
    assert jsonio.parse_assignment(obj, inst) == a
    for bad in ({"x": ["a"]}, {"x": ["a"], "y": ["b"]}, {"x": ["a"], "y": ["a"], "z": ["a"]}, ["a"]):
        with pytest.raises(ValidationError):
            jsonio.parse_assignment(bad, inst)
    sched = jsonio.emit_schedule(build_schedule(a, inst), inst)
    assert sched["starts"] == {"x": 1, "y": 0}     # y is longer, so it runs first


def test_dumps_writes_fractions_as_strings():
    assert json.loads(jsonio.dumps({"v": F(3, 4), "w": F(2)})) == {"v": "3/4", "w": 2}


def test_load_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError):
        jsonio.load_json(str(p))
