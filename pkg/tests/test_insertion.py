"""Incremental insertion deltas against a full re-evaluation of the route."""

from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from barge_alns.construction import construct
from barge_alns.destroy import DESTROY_OPS
from barge_alns.generator import generate, tiny_instance
from barge_alns.insertion import Evaluator, RouteState, _allocations, _splits, _with_block, _with_pair


def _partial(inst, name, seed):
    sol = construct(inst)
    return DESTROY_OPS[name](inst, sol, None, random.Random(seed))


def _check_f(inst, sol):
    ev = Evaluator.of(inst)
    n = 0
    for st in ev.states(sol):
        for k in sol.unassigned_f:
            o = inst.orders_f[k]
            for delta, i, j in ev.f_candidates(st, k):
                exact = RouteState(ev, st.p, _with_pair(st.route, i, j, o.origin, o.destination)).loss - st.loss
                assert delta == pytest.approx(exact, rel=1e-9, abs=1e-6)
                n += 1
    return n


def _check_e(inst, sol):
    ev = Evaluator.of(inst)
    n = 0
    free = tuple(sol.free_barges)
    for st in ev.states(sol):
        for j, r in sol.pending_e():
            h = inst.orders_e[j].destination
            nk = min(r, inst.capacity)
            for delta, i, chain in ev.block_candidates(st, j, nk, free):
                exact = RouteState(ev, st.p, _with_block(st.route, i, chain, h, j)).loss - st.loss
                assert delta == pytest.approx(exact, rel=1e-9, abs=1e-6)
                n += 1
    return n


@pytest.mark.parametrize("topology", ["oceanic", "inland"])
@pytest.mark.parametrize("row", [1, 3, 5])
def test_f_deltas_match_full_evaluation(row, topology):
    inst = generate(row, topology, seed=row)
    assert _check_f(inst, _partial(inst, "FRR", row)) > 0


@pytest.mark.parametrize("row", [2, 4, 5])
def test_e_deltas_match_full_evaluation(row):
    inst = generate(row, "oceanic", seed=row)
    assert _check_e(inst, _partial(inst, "ERR", row)) > 0


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seed=st.integers(0, 10_000), mix=st.sampled_from(["f", "fe", "coop"]), windows=st.sampled_from(["loose", "tight"]),
       op=st.sampled_from(["FRR", "RRR"]))
def test_f_deltas_tight_windows(seed, mix, windows, op):
    inst = tiny_instance(seed, mix, windows)
    if not inst.orders_f:
        return
    _check_f(inst, _partial(inst, op, seed))


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seed=st.integers(0, 10_000), mix=st.sampled_from(["e", "fe", "coop"]), windows=st.sampled_from(["loose", "tight"]))
def test_e_deltas_tight_windows(seed, mix, windows):
    inst = tiny_instance(seed, mix, windows)
    _check_e(inst, _partial(inst, "ERR", seed))


def test_splits():
    assert _splits(7, 2, 5) == [(5, 2), (2, 5), (4, 3), (3, 4)]
    assert _splits(3, 2, 5) == [(1, 2), (2, 1)]
    assert _splits(11, 2, 5) == []
    for r in range(1, 21):
        for v in range(1, 5):
            for s in _splits(r, v, 5):
                assert sum(s) == r and all(1 <= x <= 5 for x in s)


def test_allocations_respect_slots():
    # tugboat 0 already calls once; one new tugboat may join
    allocs = _allocations(3, 2, {0: 1}, 1)
    assert (0, 0) not in allocs
    assert (0, 1) in allocs and (1, 1) in allocs
    assert (1, 2) not in allocs


def test_evaluator_cache_per_penalties(line):
    from barge_alns.model import PenaltyConfig

    assert Evaluator.of(line) is Evaluator.of(line)
    assert Evaluator.of(line, PenaltyConfig(1, 1, 1)) is not Evaluator.of(line)
