from __future__ import annotations

import pytest
from conftest import line_raw

from barge_alns.errors import Infeasible, TooLarge
from barge_alns.evaluation import loss
from barge_alns.generator import tiny_instance
from barge_alns.model import build_instance
from barge_alns.oracle import enumerate_candidates, enumerate_solutions, feasible, optimum
from barge_alns.validator import validate


def test_line_optimum(line):
    # every route that reaches x = 30 sails at least 60 units at cost 2 per unit,
    # and one route can collect both barges around the typeF pickup
    sol, val = optimum(line)
    assert val == pytest.approx(120.0)
    assert loss(line, sol).total == pytest.approx(val)
    assert validate(line, sol) == []


def test_line_feasible_count(line):
    # frozen from an independent run of the enumerator
    assert sum(1 for _ in enumerate_solutions(line)) == 132
    cands = list(enumerate_candidates(line))
    assert sum(ok for _, ok in cands) == 132


def test_optimum_is_minimum_of_enumeration():
    inst = tiny_instance(0, "fe", "loose")
    vals = [lb.total for _, lb in enumerate_solutions(inst)]
    _, best = optimum(inst)
    assert best == pytest.approx(min(vals))


def test_deterministic_ties():
    inst = tiny_instance(3, "f", "loose")
    a, va = optimum(inst)
    b, vb = optimum(inst)
    assert a.encoding() == b.encoding() and va == vb


def test_too_large():
    inst = tiny_instance(0, "fe", "loose")
    with pytest.raises(TooLarge):
        optimum(inst, max_nodes=2)


def test_infeasible():
    raw = line_raw()
    raw["orders_f"][0]["destination_window"] = [0.0, 0.5]
    inst = build_instance(raw)
    with pytest.raises(Infeasible):
        optimum(inst)


@pytest.mark.parametrize("mix", ["f", "e", "fe", "coop"])
def test_feasible_agrees_with_validator(mix):
    inst = next(i for i in (tiny_instance(s, mix, "tight") for s in range(50)) if i.non_virtual_count() <= 5)
    for sol, ok in enumerate_candidates(inst, max_nodes=5):
        assert ok == feasible(inst, sol)
        assert ok == (validate(inst, sol) == [])
