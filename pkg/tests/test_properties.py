"""Randomised invariants over generated instances and operator chains."""

from __future__ import annotations

import random

from helpers import conserved
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from barge_alns.construction import construct
from barge_alns.destroy import DESTROY_OPS
from barge_alns.engine import accept
from barge_alns.evaluation import loss
from barge_alns.generator import TINY_MIXES, tiny_instance
from barge_alns.insertion import Evaluator
from barge_alns.repair import REPAIR_OPS
from barge_alns.solution import complete, solution_from_raw, solution_to_raw
from barge_alns.validator import validate

SLOW = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
# lateness and overtime are priced by the loss, not forbidden
SOFT = ("C15", "C19", "C21")
tiny = st.builds(tiny_instance, st.integers(0, 200), st.sampled_from(TINY_MIXES), st.sampled_from(["loose", "tight"]))


@SLOW
@given(tiny, st.sampled_from(sorted(DESTROY_OPS)), st.sampled_from(sorted(REPAIR_OPS)), st.integers(0, 10_000))
def test_destroy_repair_chain(inst, d, r, seed):
    rng = random.Random(seed)
    sol = construct(inst)
    for _ in range(3):
        try:
            part = DESTROY_OPS[d](inst, sol, None, rng)
        except Exception as exc:  # nothing to remove on this family
            assert type(exc).__name__ == "NothingToRemove"
            return
        assert conserved(inst, part)
        sol = REPAIR_OPS[r](inst, part, rng)
        assert complete(sol) and conserved(inst, sol)
        assert not [v for v in validate(inst, sol) if v.tag not in SOFT]


@SLOW
@given(tiny)
def test_loss_parts_and_fast_total(inst):
    sol = construct(inst)
    lb = loss(inst, sol)
    assert abs(lb.total - (lb.routing_cost + lb.penalties)) <= 1e-9 * max(1.0, lb.total)
    assert abs(Evaluator.of(inst).total(sol) - lb.total) <= 1e-6 * max(1.0, lb.total)


@SLOW
@given(tiny)
def test_solution_roundtrip(inst):
    sol = construct(inst)
    assert solution_from_raw(inst, solution_to_raw(inst, sol)) == sol


@given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(0.01, 1e3), st.integers(0, 1000))
def test_accept_never_rejects_improvement(cur, cand, temp, seed):
    if cand < cur:
        assert accept(cur, cand, temp, random.Random(seed))
