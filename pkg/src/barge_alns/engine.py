"""Adaptive large neighbourhood search main loop.

Each iteration picks an order family (typeE with probability ``1/family_b``),
draws a removal and an insertion operator from that family's banks by
roulette wheel, and accepts the candidate with the simulated-annealing rule.
The temperature follows ``t_initial * cooling**k`` where ``k`` counts the
iterations of the current epoch; when it drops below ``t_min`` it is reset
to ``t_initial``.  The search stops after ``iter_max_no_improve`` iterations
without a new best solution, or on an optional iteration or time cap.
"""

from __future__ import annotations

import csv
import io
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .adaptive import OperatorBank, Outcome, RewardTiers, end_segment, reward, select
from .construction import construct
from .destroy import DESTROY_OPS, removable
from .errors import Infeasible, InsufficientBarges, NothingToRemove
from .evaluation import LossBreakdown, Schedule, loss, propagate
from .insertion import Evaluator
from .model import Instance, PenaltyConfig
from .repair import REPAIR_OPS
from .solution import Solution

F_DESTROY = ("FRR", "FGR", "RRR", "RGR")
E_DESTROY = ("ERR", "EGR", "RRR", "RGR")
F_REPAIR = ("FRGI", "FGI", "FSGI", "FNRGI", "FNGI", "FNSGI")
E_REPAIR = ("EARI", "EAGI", "EASGI", "ENAGI", "ENASGI")

CMP_TOL = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    t_initial: float = 100.0
    cooling: float = 0.98
    t_min: float = 10.0
    iter_max_no_improve: int = 200
    family_b: int = 4
    segment_length: int = 115
    reaction: float = 0.5
    seed: int = 0
    step: int | None = None
    max_iterations: int | None = None
    time_limit: float | None = None
    regret_literal: bool = False
    tiers: RewardTiers = field(default_factory=RewardTiers)
    penalties: PenaltyConfig | None = None

    def __post_init__(self):
        if not 0 < self.cooling < 1:
            raise ValueError("cooling must be in (0, 1)")
        if not self.t_min < self.t_initial:
            raise ValueError("t_min must be below t_initial")
        if self.segment_length < 1:
            raise ValueError("segment_length must be >= 1")
        if self.family_b < 2:
            raise ValueError("family_b must be >= 2")


def temperature(cfg: SearchConfig, k: int) -> float:
    """Temperature after ``k`` iterations of an epoch."""
    return cfg.t_initial * cfg.cooling ** k


def epoch_length(cfg: SearchConfig) -> int:
    """Iterations until the temperature first drops below ``t_min``."""
    return math.ceil(math.log(cfg.t_min / cfg.t_initial) / math.log(cfg.cooling))


def accept(loss_current: float, loss_candidate: float, temperature: float, rng: random.Random) -> bool:
    """Simulated-annealing acceptance."""
    if loss_candidate < loss_current:
        return True
    return rng.random() < math.exp((loss_current - loss_candidate) / temperature)


@dataclass
class Banks:
    f_destroy: OperatorBank
    f_repair: OperatorBank
    e_destroy: OperatorBank
    e_repair: OperatorBank

    @classmethod
    def default(cls) -> "Banks":
        return cls(OperatorBank.of("F-destroy", F_DESTROY), OperatorBank.of("F-repair", F_REPAIR),
                   OperatorBank.of("E-destroy", E_DESTROY), OperatorBank.of("E-repair", E_REPAIR))

    def all(self) -> list[OperatorBank]:
        return [self.f_destroy, self.f_repair, self.e_destroy, self.e_repair]


ITER_FIELDS = ("iter", "temperature", "family", "destroy_op", "repair_op", "candidate_loss", "current_loss", "best_loss", "outcome")
WEIGHT_FIELDS = ("segment", "bank", "operator", "weight", "uses", "score")


@dataclass
class RunStats:
    seed: int = 0
    initial_loss: float = 0.0
    final_loss: float = 0.0
    construction_time: float = 0.0
    search_time: float = 0.0
    iterations: int = 0
    improvements: int = 0
    rows: list[dict] = field(default_factory=list)
    weights: list[dict] = field(default_factory=list)

    @property
    def improvement_pct(self) -> float:
        if self.initial_loss <= 0:
            return 0.0
        return 100.0 * (self.initial_loss - self.final_loss) / self.initial_loss

    def best_trace(self) -> list[float]:
        return [r["best_loss"] for r in self.rows]

    def iterations_csv(self) -> str:
        return _csv(ITER_FIELDS, self.rows)

    def weights_csv(self) -> str:
        return _csv(WEIGHT_FIELDS, self.weights)


def _csv(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


@dataclass
class SearchState:
    current: Solution
    best: Solution
    current_loss: float
    best_loss: float
    rng: random.Random
    epoch_iter: int = 0
    iteration: int = 0
    no_improve: int = 0
    segment: int = 0
    visited: set = field(default_factory=set)


@dataclass
class SolveResult:
    solution: Solution
    schedule: Schedule
    loss: LossBreakdown
    stats: RunStats


def _families(inst: Instance) -> tuple[bool, bool]:
    return bool(inst.orders_f), bool(inst.orders_e)


def step(inst: Instance, state: SearchState, banks: Banks, cfg: SearchConfig, stats: RunStats | None = None) -> Outcome:
    """One destroy/repair/accept iteration; updates ``state`` and the banks in place."""
    ev = Evaluator.of(inst, cfg.penalties)
    rng = state.rng
    T = temperature(cfg, state.epoch_iter)
    has_f, has_e = _families(inst)
    r = rng.randint(1, cfg.family_b)
    family = "E" if r == cfg.family_b else "F"
    if family == "E" and not has_e:
        family = "F"
    elif family == "F" and not has_f:
        family = "E"
    d_bank, r_bank = (banks.e_destroy, banks.e_repair) if family == "E" else (banks.f_destroy, banks.f_repair)
    di = select(d_bank.ops, rng)
    ri = select(r_bank.ops, rng)
    d_name, r_name = d_bank.ops[di].name, r_bank.ops[ri].name

    cand = None
    cand_loss = math.inf
    try:
        if removable(inst, state.current, d_name) == 0:
            raise NothingToRemove(d_name)
        partial = DESTROY_OPS[d_name](inst, state.current, cfg.step, rng, cfg.penalties)
        cand = REPAIR_OPS[r_name](inst, partial, rng, cfg.penalties, cfg.regret_literal)
        cand_loss = ev.total(cand)
    except (InsufficientBarges, NothingToRemove):
        cand = None

    outcome = Outcome.NONE
    if cand is not None:
        enc = cand.encoding()
        fresh = enc not in state.visited
        state.visited.add(enc)
        if cand_loss < state.best_loss - CMP_TOL:
            outcome = Outcome.GLOBAL_BEST
            state.best, state.best_loss = cand, cand_loss
            state.current, state.current_loss = cand, cand_loss
        elif cand_loss < state.current_loss - CMP_TOL:
            outcome = Outcome.BETTER_UNEXPLORED if fresh else Outcome.NONE
            state.current, state.current_loss = cand, cand_loss
        elif accept(state.current_loss, cand_loss, T, rng):
            outcome = Outcome.ACCEPTED_WORSE
            state.current, state.current_loss = cand, cand_loss

    reward(d_bank.ops[di], outcome, cfg.tiers)
    reward(r_bank.ops[ri], outcome, cfg.tiers)
    state.iteration += 1
    state.no_improve = 0 if outcome is Outcome.GLOBAL_BEST else state.no_improve + 1
    if stats is not None:
        stats.rows.append({
            "iter": state.iteration, "temperature": T, "family": family, "destroy_op": d_name, "repair_op": r_name,
            "candidate_loss": cand_loss, "current_loss": state.current_loss, "best_loss": state.best_loss,
            "outcome": outcome.value,
        })
        if outcome is Outcome.GLOBAL_BEST:
            stats.improvements += 1
    if state.iteration % cfg.segment_length == 0:
        state.segment += 1
        for bank in banks.all():
            end_segment(bank.ops, cfg.reaction)
            if stats is not None:
                for op in bank.ops:
                    stats.weights.append({"segment": state.segment, "bank": bank.name, "operator": op.name,
                                          "weight": op.weight, "uses": op.uses, "score": op.score})
    state.epoch_iter += 1
    if temperature(cfg, state.epoch_iter) < cfg.t_min:
        state.epoch_iter = 0
    return outcome


def solve(inst: Instance, cfg: SearchConfig = SearchConfig(), initial: Solution | None = None) -> SolveResult:
    ev = Evaluator.of(inst, cfg.penalties)
    stats = RunStats(seed=cfg.seed)
    t0 = time.perf_counter()
    try:
        sol = initial.copy() if initial is not None else construct(inst, cfg.penalties)
    except InsufficientBarges as exc:
        raise Infeasible(str(exc)) from exc
    stats.construction_time = time.perf_counter() - t0
    start_loss = ev.total(sol)
    stats.initial_loss = start_loss
    state = SearchState(current=sol, best=sol, current_loss=start_loss, best_loss=start_loss,
                        rng=random.Random(cfg.seed), visited={sol.encoding()})
    banks = Banks.default()
    t1 = time.perf_counter()
    has_f, has_e = _families(inst)
    if has_f or has_e:
        while state.no_improve < cfg.iter_max_no_improve:
            if cfg.max_iterations is not None and state.iteration >= cfg.max_iterations:
                break
            if cfg.time_limit is not None and time.perf_counter() - t1 >= cfg.time_limit:
                break
            step(inst, state, banks, cfg, stats)
    stats.search_time = time.perf_counter() - t1
    stats.iterations = state.iteration
    best = state.best
    lb = loss(inst, best, cfg.penalties)
    stats.final_loss = state.best_loss
    return SolveResult(best, propagate(inst, best, strict=False), lb, stats)


def _solve_seed(args):
    inst, cfg = args
    return solve(inst, cfg)


def thread_cap(default: int = 1) -> int:
    raw = os.environ.get("BARGE_ALNS_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def solve_multistart(inst: Instance, cfg: SearchConfig, starts: int, threads: int | None = None) -> tuple[SolveResult, list[SolveResult]]:
    """Independent runs with seeds ``cfg.seed .. cfg.seed + starts - 1``; returns the best and all runs."""
    cfgs = [replace(cfg, seed=cfg.seed + i) for i in range(starts)]
    workers = min(starts, threads if threads is not None else thread_cap())
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_solve_seed, [(inst, c) for c in cfgs]))
    else:
        runs = [solve(inst, c) for c in cfgs]
    best = min(range(len(runs)), key=lambda i: (runs[i].loss.total, i))
    return runs[best], runs
