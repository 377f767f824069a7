import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degvrp import Instance, ObjectiveSpec, Vehicle
from degvrp.instance_io import (
    DocumentError,
    canonicalize,
    format_number,
    gen_reference,
    parse_document,
    parse_instance,
    serialize_document,
    serialize_instance,
)

TWO_NODE = """{
  "cost_matrix": [
    [0, 5],
    [5, 0]
  ],
  "depot": "d",
  "energy_matrix": [
    [0, 10],
    [10, 0]
  ],
  "format_version": 1,
  "nodes": [
    {
      "id": "d"
    },
    {
      "id": "a",
      "x": 1.5,
      "y": -2
    }
  ],
  "vehicles": [
    {
      "id": "ev",
      "soc_start": 100
    }
  ]
}
"""


def doc_dict(**changes):
    d = json.loads(TWO_NODE)
    d.update(changes)
    return d


def test_parse_two_node():
    inst = parse_instance(TWO_NODE)
    assert inst.node_count == 2
    assert inst.cost[0, 1] == 5 and inst.energy[1, 0] == 10
    assert inst.vehicles == (Vehicle("ev", 100.0),)
    assert inst.coords == (None, (1.5, -2.0))


def test_round_trip_is_byte_identical():
    assert serialize_document(parse_document(TWO_NODE)) == TWO_NODE


def test_canonicalize_reorders_keys():
    messy = json.dumps(json.loads(TWO_NODE))  # single line
    assert canonicalize(messy) == TWO_NODE


def test_dimension_mismatch():
    d = doc_dict(nodes=[{"id": "d"}, {"id": "a"}, {"id": "b"}, {"id": "c"}])
    d["cost_matrix"] = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    with pytest.raises(DocumentError, match="cost_matrix.*3 rows but there are 4 nodes"):
        parse_instance(json.dumps(d))


@pytest.mark.parametrize(
    "change, match",
    [
        (dict(extra=1), "unknown members"),
        (dict(format_version=2), "format_version"),
        (dict(depot="zz"), "not a node id"),
        (dict(depot="a"), "must be the first"),
        (dict(vehicles=[{"id": "ev", "soc_start": "full"}]), r"vehicles\[0\].soc_start"),
        (dict(vehicles=[{"id": "ev", "soc_start": 100, "cap": 1}]), "unknown members"),
        (dict(vehicles=[{"id": "ev", "soc_start": 120}]), "soc_start"),
        (dict(cost_matrix=[[0, -5], [5, 0]]), r"cost\[0, 1\]"),
        (dict(cost_matrix=[[0, 5], [5]]), r"cost_matrix\[1\]"),
        (dict(cost_matrix=[[0, True], [5, 0]]), "expected a number"),
        (dict(nodes=[{"id": "d"}, {"id": "a", "x": 1}]), "both x and y"),
        (dict(nodes=[{"id": "d"}, {"id": "d"}]), "unique"),
        (dict(default_objective={"variant": "cubic", "alpha": 1}), "default_objective"),
        (dict(default_objective={"variant": "quad"}), "missing members"),
    ],
)
def test_strict_rejections(change, match):
    with pytest.raises(DocumentError, match=match):
        parse_instance(json.dumps(doc_dict(**change)))


def test_missing_member():
    d = doc_dict()
    del d["vehicles"]
    with pytest.raises(DocumentError, match="missing members"):
        parse_instance(json.dumps(d))


def test_syntax_error_has_line():
    with pytest.raises(DocumentError) as info:
        parse_instance('{\n  "a": 1,\n  oops\n}')
    assert info.value.line == 3


def test_duplicate_key():
    with pytest.raises(DocumentError, match="duplicate"):
        parse_instance('{"depot": "d", "depot": "d"}')


def test_default_objective_round_trip():
    text = serialize_instance(parse_instance(TWO_NODE), ObjectiveSpec("linear", 0.25))
    doc = parse_document(text)
    assert doc.default_objective == ObjectiveSpec("linear", 0.25)
    assert serialize_document(doc) == text


def test_number_format():
    assert format_number(5.0) == "5"
    assert format_number(-0.0) == "0"
    assert format_number(1 / 3) == "0.333333"
    assert format_number(1234567.0) == "1.23457e+06"


@given(
    st.integers(2, 5).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.floats(0, 1e4, allow_nan=False), min_size=n * n, max_size=n * n),
            st.lists(st.floats(0, 100), min_size=1, max_size=n - 1),
        )
    )
)
@settings(max_examples=60, deadline=None)
def test_round_trip_property(case):
    n, vals, socs = case
    cost = np.array(vals).reshape(n, n)
    np.fill_diagonal(cost, 0)
    inst = Instance(cost, cost / 100, [Vehicle(f"v{i}", s) for i, s in enumerate(socs)])
    text = serialize_instance(inst)
    # canonical text is a fixed point even though numbers are rounded
    assert serialize_document(parse_document(text)) == text
    again = parse_instance(text)
    assert np.allclose(again.cost, inst.cost, rtol=1e-5)


def test_gen_reference_document():
    doc = gen_reference()
    text = serialize_document(doc)
    assert parse_document(text) == doc
    assert doc.instance.node_count == 8 and doc.instance.n_vehicles == 3
    assert serialize_document(gen_reference()) == text
