from __future__ import annotations

import json
import math

import pytest
from conftest import line_raw

from barge_alns.errors import InconsistentError, SchemaError
from barge_alns.generator import generate
from barge_alns.model import (NodeKind, build_instance, dumps_canonical, great_circle_km, load_instance,
                              save_instance)


def test_node_layout(line):
    assert line.kinds == (NodeKind.ORIGIN, NodeKind.DESTINATION, NodeKind.E_DESTINATION, NodeKind.BARGE,
                          NodeKind.BARGE, NodeKind.SOURCE, NodeKind.SINK)
    assert (line.source, line.sink) == (5, 6)
    assert line.barge_nodes == (3, 4)
    assert line.f_order_of == {0: 0, 1: 0}
    assert line.e_order_of == {2: 0}
    assert line.non_virtual_count() == 5


def test_arc_cost_is_time_plus_distance(line):
    # C^T = 10, C^D = 1, t = d / 10, so every arc costs 2 d
    assert line.arc_cost[0][5][1] == pytest.approx(2 * 30.0)
    assert line.arc_cost[1][3][2] == pytest.approx(2 * 15.0)


def test_windows_default_open(line):
    assert line.latest[0] == math.inf
    assert line.earliest[2] == 0.0


def test_round_trip(tmp_path, line):
    path = tmp_path / "i.json"
    save_instance(line, path)
    again = load_instance(path)
    assert dumps_canonical(again.to_raw()) == dumps_canonical(line.to_raw())


def test_generated_round_trip():
    inst = generate(2, "inland", seed=3)
    again = build_instance(json.loads(dumps_canonical(inst.to_raw())))
    assert dumps_canonical(again.to_raw()) == dumps_canonical(inst.to_raw())


@pytest.mark.parametrize("key", ["tugboats", "orders_f", "orders_e", "barges", "network"])
def test_missing_field(key):
    raw = line_raw()
    del raw[key]
    with pytest.raises(SchemaError):
        build_instance(raw)


def test_too_few_barges():
    raw = line_raw(barges=[{"idle_until": 0.0}])
    with pytest.raises(InconsistentError):
        build_instance(raw)


def test_inverted_window():
    raw = line_raw()
    raw["orders_f"][0]["origin_window"] = [5.0, 1.0]
    with pytest.raises((InconsistentError, SchemaError)):
        build_instance(raw)


def test_bad_matrix_shape():
    raw = line_raw()
    raw["network"]["time_matrix"] = [[0.0]]
    with pytest.raises(SchemaError):
        build_instance(raw)


def test_not_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{nope")
    with pytest.raises(SchemaError):
        load_instance(p)


def test_great_circle_known_distance():
    # one degree of latitude is about 111.2 km
    assert great_circle_km((30.0, 120.0), (31.0, 120.0)) == pytest.approx(111.19, abs=0.05)
    assert great_circle_km((30.0, 120.0), (30.0, 120.0)) == 0.0
