from __future__ import annotations

import pytest
from conftest import line_raw, line_solution

from barge_alns.errors import NegativeLoad
from barge_alns.evaluation import LossBreakdown, Schedule, loss, propagate, propagate_route, route_parts
from barge_alns.model import PenaltyConfig, build_instance
from barge_alns.solution import RouteElement as El
from barge_alns.solution import Solution


def test_hand_loss(line, line_sol):
    lb = loss(line, line_sol)
    assert lb.time_cost == pytest.approx(100.0)
    assert lb.distance_cost == pytest.approx(100.0)
    assert lb.penalties == 0.0
    assert lb.total == pytest.approx(200.0)


def test_hand_schedule(line, line_sol):
    sched = propagate(line, line_sol)
    assert sched.finish == pytest.approx([6.0, 4.0])
    b = sched.stops[1]
    assert [s.arrival for s in b] == pytest.approx([0.5, 1.5, 2.0])
    assert [s.empty_load for s in b] == [1, 2, 0]
    assert b[-1].dropped == 2
    assert [s.full_load for s in sched.stops[0]] == [1, 0]


def test_schedule_raw_round_trip(line, line_sol):
    sched = propagate(line, line_sol)
    assert Schedule.from_raw(sched.to_raw()) == sched


def test_waiting_for_window():
    raw = line_raw()
    raw["orders_f"][0]["origin_window"] = [4.0, None]
    inst = build_instance(raw)
    stops, finish = propagate_route(inst, [El(0), El(1)])
    assert stops[0].arrival == 1.0 and stops[0].stay == pytest.approx(3.0)
    assert finish == pytest.approx(9.0)
    # waiting costs nothing: the objective only counts arcs
    assert loss(inst, line_solution()).total == pytest.approx(200.0)


def test_barge_idle_time_delays():
    raw = line_raw()
    raw["barges"][0]["idle_until"] = 2.0
    inst = build_instance(raw)
    stops, _ = propagate_route(inst, [El(3, 1, 0), El(4, 1, 0), El(2, 1, 0)])
    assert stops[0].stay == pytest.approx(1.5)
    assert stops[1].arrival == pytest.approx(3.0)


def test_lateness_penalty():
    raw = line_raw()
    raw["orders_f"][0]["destination_window"] = [0.0, 2.5]
    inst = build_instance(raw)
    lb = loss(inst, line_solution())
    assert lb.tw_penalty == pytest.approx(1e4 * 0.5)
    assert lb.total == pytest.approx(200.0 + 5000.0)


def test_hours_penalty():
    raw = line_raw()
    raw["tugboats"][0]["max_working_time"] = 5.0
    inst = build_instance(raw)
    lb = loss(inst, line_solution())
    assert lb.hours_penalty == pytest.approx(1e4 * 1.0)


def test_unserved_penalty(line):
    lb = loss(line, Solution.empty(line))
    # one pooled typeF order, one pooled typeE order, two barges still needed
    assert lb.unserved_penalty == pytest.approx(1e5 * 4)
    assert lb.routing_cost == 0.0


def test_custom_penalties(line):
    lb = loss(line, Solution.empty(line), PenaltyConfig(1.0, 1.0, 2.0))
    assert lb.total == pytest.approx(8.0)


def test_route_parts(line):
    ct, cd, late, over = route_parts(line, 0, [El(0), El(1)])
    assert (ct, cd, late, over) == pytest.approx((60.0, 60.0, 0.0, 0.0))


def test_empty_route_costs_nothing(line):
    assert route_parts(line, 0, [])[:2] == (0.0, 0.0)


def test_negative_load_strict(line):
    with pytest.raises(NegativeLoad):
        propagate_route(line, [El(1), El(0)])
    stops, _ = propagate_route(line, [El(1), El(0)], strict=False)
    assert stops[0].full_load == -1


def test_breakdown_raw(line, line_sol):
    raw = loss(line, line_sol).to_raw()
    assert raw["total"] == pytest.approx(200.0)
    assert set(raw) == {"time_cost", "distance_cost", "tw_penalty", "hours_penalty", "unserved_penalty", "total"}
    assert LossBreakdown().total == 0.0
