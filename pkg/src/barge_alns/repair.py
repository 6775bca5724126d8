"""Insertion operators.

Every operator returns a complete solution.  The operator's own order
family is re-inserted with its rule; pooled orders of the other family (left
by a route removal) are then completed with that family's default greedy
rule, so any removal can be followed by any insertion.

Noisy variants multiply each candidate's marginal loss by a fresh
``rng.random()`` draw before comparing.  Only ``rng.random`` is used for
noise, so an RNG whose ``random`` returns 1.0 makes every noisy operator take
the same decisions as its noiseless twin.

Regret is the gap between an order's best and second-best candidate.  By
default the order with the largest regret goes first; ``regret_literal``
takes the smallest gap instead.  Orders with fewer than two candidates have
infinite regret.
"""

from __future__ import annotations

import heapq
import math
import random
from typing import Callable

from .errors import InsufficientBarges
from .insertion import EPlan, Evaluator, EVisit, RouteState, _allocations, _splits, _with_block, apply_plan, insert_f
from .model import Instance, PenaltyConfig
from .solution import Solution

INF = math.inf


# ---------------------------------------------------------------------------
# typeF


class _FTable:
    """Best two (value, p, i, j) per (order, tugboat), refreshed per route."""

    def __init__(self, ev: Evaluator, states: list[RouteState], rng: random.Random | None):
        self.ev = ev
        self.states = states
        self.rng = rng
        self.top: dict[tuple[int, int], list] = {}

    def refresh(self, p: int, orders) -> None:
        st = self.states[p]
        rng = self.rng
        for k in orders:
            cands = self.ev.f_candidates(st, k)
            if rng is None:
                vals = [(d, p, i, j) for d, i, j in cands]
            else:
                vals = [(d * rng.random(), p, i, j) for d, i, j in cands]
            self.top[(k, p)] = heapq.nsmallest(2, vals)

    def best2(self, k: int) -> list:
        merged = []
        for p in range(len(self.states)):
            merged.extend(self.top.get((k, p), ()))
        return heapq.nsmallest(2, merged)


def _f_random_order(ev: Evaluator, sol: Solution, states: list[RouteState], rng: random.Random, noisy: bool) -> None:
    pool = list(sol.unassigned_f)
    rng.shuffle(pool)
    for k in pool:
        table = _FTable(ev, states, rng if noisy else None)
        for p in range(len(states)):
            table.refresh(p, [k])
        _, p, i, j = table.best2(k)[0]
        insert_f(ev, sol, states, k, p, i, j)


def _f_greedy(ev: Evaluator, sol: Solution, states: list[RouteState], rng: random.Random | None, regret: bool,
              literal: bool = False) -> None:
    pool = list(sol.unassigned_f)
    table = _FTable(ev, states, rng)
    for p in range(len(states)):
        table.refresh(p, pool)
    while pool:
        best_key, pick = None, None
        for k in pool:
            top = table.best2(k)
            if regret:
                gap = top[1][0] - top[0][0] if len(top) > 1 else INF
                key = (gap if literal else -gap, top[0][0], k)
            else:
                key = (top[0][0], k)
            if best_key is None or key < best_key:
                best_key, pick = key, (k, top[0])
        k, (_, p, i, j) = pick
        insert_f(ev, sol, states, k, p, i, j)
        pool.remove(k)
        table.refresh(p, pool)


# ---------------------------------------------------------------------------
# typeE


def _check_barges(sol: Solution) -> None:
    need = sum(c for c in sol.unassigned_e.values() if c > 0)
    if need > len(sol.free_barges):
        raise InsufficientBarges(f"{need} barges pending, {len(sol.free_barges)} free")


def _e_random(ev: Evaluator, sol: Solution, states: list[RouteState], rng: random.Random) -> None:
    _check_barges(sol)
    K = ev.K
    order = [j for j, _ in sol.pending_e()]
    rng.shuffle(order)
    for j in order:
        r = sol.unassigned_e.get(j, 0)
        if r <= 0:
            continue
        slots, new_allowed = ev.e_slots(sol, j)
        v = max(1, math.ceil(r / K))
        allocs = []
        while not allocs and v <= 4:
            allocs = _allocations(len(sol.routes), v, slots, new_allowed)
            if not allocs:
                v += 1
        alloc = rng.choice(allocs)
        splits = _splits(r, v, K, same_tug=len(set(alloc)) < len(alloc))
        split = rng.choice(splits)
        h = ev.h_node[j]
        local: dict[int, RouteState] = {}
        visits = []
        free = list(sol.free_barges)
        for p, nk in zip(alloc, split):
            st = local.get(p) or states[p]
            pos = rng.choice(ev.block_positions(st, j, nk))
            chain = tuple(rng.sample(free, nk))
            for b in chain:
                free.remove(b)
            visits.append(EVisit(p, pos, chain))
            local[p] = RouteState(ev, p, _with_block(st.route, pos, chain, h, j))
        apply_plan(ev, sol, states, EPlan(j, visits, 0.0))


def _noised(plans: list[EPlan], rng: random.Random | None) -> list[float]:
    if rng is None:
        return [pl.delta for pl in plans]
    return [pl.delta * rng.random() for pl in plans]


def _e_greedy(ev: Evaluator, sol: Solution, states: list[RouteState], rng: random.Random | None, regret: bool,
              literal: bool = False) -> None:
    _check_barges(sol)
    while True:
        pending = [j for j, _ in sol.pending_e()]
        if not pending:
            return
        best_key, pick = None, None
        for j in pending:
            plans = ev.e_plans(sol, states, j, sol.unassigned_e[j])
            if not plans:
                raise InsufficientBarges(f"no visit slot left for typeE order {j}")
            vals = _noised(plans, rng)
            order = sorted(range(len(plans)), key=lambda x: (vals[x], x))
            first = vals[order[0]]
            if regret:
                gap = vals[order[1]] - first if len(order) > 1 else INF
                key = (gap if literal else -gap, first, j)
            else:
                key = (first, j)
            if best_key is None or key < best_key:
                best_key, pick = key, plans[order[0]]
        apply_plan(ev, sol, states, ev.finish_plan(sol, states, pick))


# ---------------------------------------------------------------------------
# operators


def _complete_f(ev, sol, states):
    if sol.unassigned_f:
        _f_greedy(ev, sol, states, None, regret=False)


def _complete_e(ev, sol, states):
    if sol.pending_e():
        _e_greedy(ev, sol, states, None, regret=False)


def _f_op(kind: str, noisy: bool):
    def op(inst: Instance, sol: Solution, rng: random.Random | None = None, penalties: PenaltyConfig | None = None,
           regret_literal: bool = False) -> Solution:
        ev = Evaluator.of(inst, penalties)
        out = sol.copy()
        states = ev.states(out)
        noise = rng if noisy else None
        if kind == "random":
            _f_random_order(ev, out, states, rng, noisy)
        else:
            _f_greedy(ev, out, states, noise, regret=(kind == "regret"), literal=regret_literal)
        _complete_e(ev, out, states)
        return out

    return op


def _e_op(kind: str, noisy: bool):
    def op(inst: Instance, sol: Solution, rng: random.Random | None = None, penalties: PenaltyConfig | None = None,
           regret_literal: bool = False) -> Solution:
        ev = Evaluator.of(inst, penalties)
        out = sol.copy()
        states = ev.states(out)
        if kind == "random":
            _e_random(ev, out, states, rng)
        else:
            _e_greedy(ev, out, states, rng if noisy else None, regret=(kind == "regret"), literal=regret_literal)
        _complete_f(ev, out, states)
        return out

    return op


frgi = _f_op("random", False)
fgi = _f_op("greedy", False)
fsgi = _f_op("regret", False)
fnrgi = _f_op("random", True)
fngi = _f_op("greedy", True)
fnsgi = _f_op("regret", True)
eari = _e_op("random", False)
eagi = _e_op("greedy", False)
easgi = _e_op("regret", False)
enagi = _e_op("greedy", True)
enasgi = _e_op("regret", True)

for _name, _fn, _doc in (
    ("frgi", frgi, "Insert pooled typeF orders in random order, each at its cheapest position."),
    ("fgi", fgi, "Repeatedly insert the pooled typeF order with the cheapest insertion."),
    ("fsgi", fsgi, "Regret insertion of pooled typeF orders."),
    ("fnrgi", fnrgi, "Random-order insertion with noised candidate losses."),
    ("fngi", fngi, "Cheapest-first insertion with noised candidate losses."),
    ("fnsgi", fnsgi, "Regret insertion with noised candidate losses."),
    ("eari", eari, "Serve pooled typeE orders with random tugboats, positions and barges."),
    ("eagi", eagi, "Repeatedly apply the cheapest typeE insertion plan."),
    ("easgi", easgi, "Regret insertion of typeE plans."),
    ("enagi", enagi, "Cheapest-plan typeE insertion with noised plan losses."),
    ("enasgi", enasgi, "Regret typeE insertion with noised plan losses."),
):
    _fn.__name__ = _fn.__qualname__ = _name
    _fn.__doc__ = _doc

RepairOp = Callable[..., Solution]

F_REPAIR_OPS: dict[str, RepairOp] = {"FRGI": frgi, "FGI": fgi, "FSGI": fsgi, "FNRGI": fnrgi, "FNGI": fngi, "FNSGI": fnsgi}
E_REPAIR_OPS: dict[str, RepairOp] = {"EARI": eari, "EAGI": eagi, "EASGI": easgi, "ENAGI": enagi, "ENASGI": enasgi}
REPAIR_OPS: dict[str, RepairOp] = {**F_REPAIR_OPS, **E_REPAIR_OPS}

__all__ = ["REPAIR_OPS", "F_REPAIR_OPS", "E_REPAIR_OPS"] + [n.lower() for n in REPAIR_OPS]
