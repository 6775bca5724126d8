from __future__ import annotations

import csv
import io
import math
import random

import pytest

from barge_alns.adaptive import Outcome
from barge_alns.construction import construct
from barge_alns.engine import (ITER_FIELDS, WEIGHT_FIELDS, Banks, SearchConfig, SearchState, accept, epoch_length,
                               solve, solve_multistart, step, temperature, thread_cap)
from barge_alns.evaluation import loss
from barge_alns.generator import generate, tiny_instance
from barge_alns.model import build_instance
from barge_alns.validator import validate


def test_temperature_exact():
    cfg = SearchConfig()
    for n in (0, 1, 7, 50, 113):
        assert temperature(cfg, n) == 100.0 * 0.98 ** n


def test_epoch_length():
    assert epoch_length(SearchConfig()) == 114
    cfg = SearchConfig()
    assert temperature(cfg, 113) >= cfg.t_min > temperature(cfg, 114)


def test_epoch_reset_in_loop():
    inst = tiny_instance(0, "fe")
    cfg = SearchConfig(max_iterations=120, iter_max_no_improve=10_000)
    state = _state(inst, cfg)
    banks = Banks.default()
    temps = []
    for _ in range(120):
        temps.append(temperature(cfg, state.epoch_iter))
        step(inst, state, banks, cfg)
    assert temps[113] == 100.0 * 0.98 ** 113
    assert temps[114] == 100.0


def test_accept_rate_half():
    rng = random.Random(0)
    n = 100_000
    hits = sum(accept(0.0, 69.3147, 100.0, rng) for _ in range(n))
    assert abs(hits / n - 0.5) <= 0.01


def test_accept_better_always():
    rng = random.Random(0)
    assert all(accept(10.0, 9.0, 1e-9, rng) for _ in range(100))


def test_config_checks():
    with pytest.raises(ValueError):
        SearchConfig(cooling=1.0)
    with pytest.raises(ValueError):
        SearchConfig(t_min=200.0)
    with pytest.raises(ValueError):
        SearchConfig(family_b=1)


def _state(inst, cfg):
    sol = construct(inst)
    v = loss(inst, sol).total
    return SearchState(current=sol, best=sol, current_loss=v, best_loss=v, rng=random.Random(cfg.seed),
                       visited={sol.encoding()})


def test_step_monotone_best():
    inst = generate(1, "oceanic", 0)
    cfg = SearchConfig(seed=3)
    state = _state(inst, cfg)
    banks = Banks.default()
    prev = state.best_loss
    for _ in range(30):
        out = step(inst, state, banks, cfg)
        assert isinstance(out, Outcome)
        assert state.best_loss <= prev
        if out is Outcome.GLOBAL_BEST:
            assert state.best_loss < prev
        prev = state.best_loss
        assert state.best_loss <= state.current_loss + 1e-9


def test_segment_updates_weights():
    inst = tiny_instance(1, "fe")
    cfg = SearchConfig(segment_length=5)
    state = _state(inst, cfg)
    banks = Banks.default()
    for _ in range(5):
        step(inst, state, banks, cfg)
    for bank in banks.all():
        assert all(op.uses == 0 and op.score == 0 for op in bank.ops)
    assert any(op.weight != 1.0 for bank in banks.all() for op in bank.ops)


@pytest.fixture(scope="module")
def row1():
    return generate(1, "oceanic", 0)


@pytest.fixture(scope="module")
def run(row1):
    return solve(row1, SearchConfig(seed=5, iter_max_no_improve=60))


def test_solve_improves(row1, run):
    st = run.stats
    assert st.final_loss <= st.initial_loss
    assert run.loss.total == pytest.approx(st.final_loss)
    assert validate(row1, run.solution) == []
    trace = st.best_trace()
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_solve_deterministic(row1, run):
    again = solve(row1, SearchConfig(seed=5, iter_max_no_improve=60))
    assert again.solution == run.solution
    assert again.stats.rows == run.stats.rows


def test_csv_outputs(run):
    rows = list(csv.DictReader(io.StringIO(run.stats.iterations_csv())))
    assert tuple(rows[0]) == ITER_FIELDS
    assert len(rows) == run.stats.iterations
    w = list(csv.DictReader(io.StringIO(run.stats.weights_csv())))
    if w:
        assert tuple(w[0]) == WEIGHT_FIELDS


def test_iteration_cap(row1):
    res = solve(row1, SearchConfig(max_iterations=7))
    assert res.stats.iterations == 7


def test_multistart_not_worse(row1, run):
    best, runs = solve_multistart(row1, SearchConfig(seed=5, iter_max_no_improve=60), 2, threads=1)
    assert len(runs) == 2
    assert runs[0].solution == run.solution
    assert best.loss.total <= run.loss.total


def test_thread_cap(monkeypatch):
    monkeypatch.delenv("BARGE_ALNS_THREADS", raising=False)
    assert thread_cap() == 1
    monkeypatch.setenv("BARGE_ALNS_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.setenv("BARGE_ALNS_THREADS", "x")
    assert thread_cap(2) == 2


def test_empty_instance():
    inst = build_instance({"tugboats": [{"id": "a"}], "orders_f": [], "orders_e": [], "barges": [],
                           "network": {"time_matrix": [[0, 0], [0, 0]], "distance_matrix": [[0, 0], [0, 0]]}})
    res = solve(inst)
    assert res.stats.iterations == 0
    assert res.loss.total == 0
    assert not math.isnan(res.stats.improvement_pct)
