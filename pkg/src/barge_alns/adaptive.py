"""Operator weights, scores and roulette-wheel selection."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from .errors import EmptyBank


class Outcome(enum.Enum):
    GLOBAL_BEST = "GlobalBest"
    BETTER_UNEXPLORED = "BetterUnexplored"
    ACCEPTED_WORSE = "AcceptedWorse"
    NONE = "None"


@dataclass(frozen=True)
class RewardTiers:
    global_best: float = 1.5
    better_unexplored: float = 1.2
    accepted_worse: float = 0.8
    none: float = 0.6

    def __post_init__(self):
        if not self.global_best > self.better_unexplored > self.accepted_worse > self.none > 0:
            raise ValueError("reward tiers must be strictly decreasing and positive")

    def of(self, outcome: Outcome) -> float:
        return {
            Outcome.GLOBAL_BEST: self.global_best,
            Outcome.BETTER_UNEXPLORED: self.better_unexplored,
            Outcome.ACCEPTED_WORSE: self.accepted_worse,
            Outcome.NONE: self.none,
        }[outcome]


@dataclass
class OperatorStats:
    name: str
    weight: float = 1.0
    score: float = 0.0
    uses: int = 0


@dataclass
class OperatorBank:
    name: str
    ops: list[OperatorStats] = field(default_factory=list)

    @classmethod
    def of(cls, name: str, op_names) -> "OperatorBank":
        return cls(name, [OperatorStats(n) for n in op_names])

    def index(self, op_name: str) -> int:
        for i, op in enumerate(self.ops):
            if op.name == op_name:
                return i
        raise KeyError(op_name)


def probabilities(bank: list[OperatorStats]) -> list[float]:
    total = sum(op.weight for op in bank)
    return [op.weight / total for op in bank]


def select(bank: list[OperatorStats], rng: random.Random) -> int:
    """Roulette wheel: index ``j`` with probability ``w_j / sum(w)``."""
    if not bank:
        raise EmptyBank("operator bank is empty")
    total = sum(op.weight for op in bank)
    r = rng.random() * total
    acc = 0.0
    for j, op in enumerate(bank):
        acc += op.weight
        if r < acc:
            return j
    return len(bank) - 1


def reward(stats: OperatorStats, outcome: Outcome, tiers: RewardTiers = RewardTiers()) -> OperatorStats:
    stats.score += tiers.of(outcome)
    stats.uses += 1
    return stats


def end_segment(bank: list[OperatorStats], reaction: float = 0.5) -> list[OperatorStats]:
    """Blend weights with the segment's average score, then reset the counters.

    Operators not used during the segment keep their weight.
    """
    for op in bank:
        if op.uses > 0:
            op.weight = reaction * op.weight + (1.0 - reaction) * op.score / op.uses
        op.score = 0.0
        op.uses = 0
    return bank
