"""Greedy construction of a first complete solution.

typeF orders are inserted one by one, in input order, at the cheapest
(tugboat, origin position, destination position); typeE orders follow, each
served by the cheapest plan for its barge count (one visit, two visits or two
tugboats, see :meth:`Evaluator.e_plans`).
"""

from __future__ import annotations

from .errors import InsufficientBarges
from .insertion import EPlan, Evaluator, RouteState, apply_plan, insert_f
from .model import Instance, PenaltyConfig
from .solution import Solution


def best_f_position(ev: Evaluator, states: list[RouteState], k: int) -> tuple[float, int, int, int] | None:
    """Cheapest (delta, p, i, j) for order ``k``; ties go to the lowest tugboat then earliest position."""
    best = None
    for p, st in enumerate(states):
        for delta, i, j in ev.f_candidates(st, k):
            cand = (delta, p, i, j)
            if best is None or cand < best:
                best = cand
    return best


def greedy_insert_f(inst: Instance, sol: Solution, k: int, penalties: PenaltyConfig | None = None,
                    states: list[RouteState] | None = None) -> float:
    """Insert pooled order ``k`` at its cheapest position; returns the route loss increase."""
    ev = Evaluator.of(inst, penalties)
    states = states if states is not None else ev.states(sol)
    delta, p, i, j = best_f_position(ev, states, k)
    insert_f(ev, sol, states, k, p, i, j)
    return delta


def best_e_plan(ev: Evaluator, sol: Solution, states: list[RouteState], j: int) -> EPlan:
    r = sol.unassigned_e.get(j, 0)
    if len(sol.free_barges) < r:
        raise InsufficientBarges(f"typeE order {j} needs {r} barges, {len(sol.free_barges)} free")
    plans = ev.e_plans(sol, states, j, r)
    if not plans:
        raise InsufficientBarges(f"no visit slot left for typeE order {j}")
    best = min(range(len(plans)), key=lambda x: (plans[x].delta, x))
    return ev.finish_plan(sol, states, plans[best])


def greedy_insert_e(inst: Instance, sol: Solution, j: int, penalties: PenaltyConfig | None = None,
                    states: list[RouteState] | None = None) -> EPlan:
    """Serve the remaining barges of pooled typeE order ``j`` with the cheapest plan."""
    ev = Evaluator.of(inst, penalties)
    states = states if states is not None else ev.states(sol)
    plan = best_e_plan(ev, sol, states, j)
    apply_plan(ev, sol, states, plan)
    return plan


def construct(inst: Instance, penalties: PenaltyConfig | None = None) -> Solution:
    ev = Evaluator.of(inst, penalties)
    sol = Solution.empty(inst)
    states = ev.states(sol)
    for k in range(len(inst.orders_f)):
        greedy_insert_f(inst, sol, k, penalties, states)
    for j in range(len(inst.orders_e)):
        if sol.unassigned_e.get(j, 0) > 0:
            greedy_insert_e(inst, sol, j, penalties, states)
    return sol
