from __future__ import annotations

import math
import random

import pytest

from barge_alns.adaptive import (OperatorBank, OperatorStats, Outcome, RewardTiers, end_segment, probabilities, reward,
                                 select)
from barge_alns.errors import EmptyBank


@pytest.mark.parametrize("outcome,add", [(Outcome.GLOBAL_BEST, 1.5), (Outcome.BETTER_UNEXPLORED, 1.2),
                                         (Outcome.ACCEPTED_WORSE, 0.8), (Outcome.NONE, 0.6)])
def test_reward_tiers(outcome, add):
    op = OperatorStats("x", score=2.0, uses=3)
    reward(op, outcome)
    assert op.score == 2.0 + add
    assert op.uses == 4


def test_tiers_must_decrease():
    with pytest.raises(ValueError):
        RewardTiers(1.0, 1.2, 0.8, 0.6)
    with pytest.raises(ValueError):
        RewardTiers(1.5, 1.2, 0.8, 0.0)


def test_end_segment_hand_case():
    bank = [OperatorStats("a", weight=1.0), OperatorStats("b", weight=2.0), OperatorStats("c", weight=0.7)]
    for o in (Outcome.GLOBAL_BEST, Outcome.NONE, Outcome.ACCEPTED_WORSE):
        reward(bank[0], o)
    reward(bank[1], Outcome.BETTER_UNEXPLORED)
    end_segment(bank)
    # a: 0.5*1 + 0.5*(2.9/3); b: 0.5*2 + 0.5*1.2; c unused
    assert bank[0].weight == pytest.approx(0.5 + 0.5 * 2.9 / 3, abs=1e-12)
    assert bank[1].weight == pytest.approx(1.6, abs=1e-12)
    assert bank[2].weight == 0.7
    assert all(op.score == 0 and op.uses == 0 for op in bank)


def test_end_segment_reaction():
    bank = [OperatorStats("a", weight=4.0)]
    reward(bank[0], Outcome.GLOBAL_BEST)
    end_segment(bank, reaction=0.25)
    assert bank[0].weight == pytest.approx(0.25 * 4.0 + 0.75 * 1.5)


def test_empty_bank():
    with pytest.raises(EmptyBank):
        select([], random.Random(0))


def test_bank_index():
    b = OperatorBank.of("d", ["FRR", "FGR"])
    assert b.index("FGR") == 1
    with pytest.raises(KeyError):
        b.index("nope")


def test_selection_frequencies():
    w = [1.0, 2.5, 0.5, 4.0]
    bank = [OperatorStats(str(i), weight=x) for i, x in enumerate(w)]
    rng = random.Random(42)
    n = 100_000
    counts = [0] * len(w)
    for _ in range(n):
        counts[select(bank, rng)] += 1
    for c, p in zip(counts, probabilities(bank)):
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(c - n * p) <= 3 * sigma


def test_zero_weight_never_drawn():
    bank = [OperatorStats("a", weight=0.0), OperatorStats("b", weight=1.0)]
    rng = random.Random(1)
    assert all(select(bank, rng) == 1 for _ in range(1000))
