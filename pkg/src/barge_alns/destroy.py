"""Removal operators.

Each operator returns a new solution; the input is left untouched.  Removed
typeF orders go back to ``unassigned_f``.  Removing a typeE call also
removes the barges it drops (its trip), frees them and adds their count back
to the order's pending barges, so the other orders' trips are never touched.

``step`` defaults to ``max(1, ceil(0.15 * n))`` where ``n`` counts the
entities the operator can remove (routed typeF orders, typeE calls, or
non-empty routes) and is capped at ``n``.
"""

from __future__ import annotations

import math
import random
from typing import Callable

from .errors import NothingToRemove
from .insertion import Evaluator
from .model import Instance, NodeKind, PenaltyConfig
from .solution import Route, Solution, renumber_h_visits

DEFAULT_FRACTION = 0.15


def default_step(count: int, fraction: float = DEFAULT_FRACTION) -> int:
    return max(1, math.ceil(fraction * count))


def _steps(step: int | None, count: int) -> int:
    if count == 0:
        raise NothingToRemove("nothing to remove")
    s = default_step(count) if step is None else int(step)
    if s < 1:
        raise ValueError("step must be >= 1")
    return min(s, count)


# ---------------------------------------------------------------------------
# bookkeeping helpers


def routed_f(inst: Instance, sol: Solution) -> list[int]:
    out = []
    for r in sol.routes:
        for el in r:
            if inst.kinds[el.node] is NodeKind.ORIGIN:
                out.append(inst.f_order_of[el.node])
    return sorted(out)


def e_calls(inst: Instance, sol: Solution) -> list[tuple[int, int]]:
    """(tugboat, position) of every typeE destination call."""
    return [(p, pos) for p, r in enumerate(sol.routes) for pos, el in enumerate(r)
            if inst.kinds[el.node] is NodeKind.E_DESTINATION]


def without_f(inst: Instance, route: Route, k: int) -> Route:
    o = inst.orders_f[k]
    return [el for el in route if el.node != o.origin and el.node != o.destination]


def trip_positions(inst: Instance, route: Route, pos: int) -> list[int]:
    """Positions of the barges dropped by the call at ``pos``."""
    j = inst.e_order_of[route[pos].node]
    h = route[pos].node
    out = []
    for q in range(pos - 1, -1, -1):
        el = route[q]
        if el.node == h:
            break
        if el.order == j and inst.kinds[el.node] is NodeKind.BARGE:
            out.append(q)
    return sorted(out)


def without_call(inst: Instance, route: Route, pos: int) -> tuple[Route, list[int]]:
    """Route without the call at ``pos`` and its trip; also returns the freed barges."""
    trip = trip_positions(inst, route, pos)
    drop = set(trip) | {pos}
    barges = [route[q].node for q in trip]
    rest = [el for q, el in enumerate(route) if q not in drop]
    return renumber_h_visits(inst, rest), barges


def remove_f(inst: Instance, sol: Solution, k: int) -> None:
    o = inst.orders_f[k]
    for p, r in enumerate(sol.routes):
        if any(el.node == o.origin for el in r):
            sol.routes[p] = without_f(inst, r, k)
    sol.pool_f(k)


def remove_call(inst: Instance, sol: Solution, p: int, pos: int) -> None:
    j = inst.e_order_of[sol.routes[p][pos].node]
    sol.routes[p], barges = without_call(inst, sol.routes[p], pos)
    for b in barges:
        sol.free(b)
    sol.pool_e(j, len(barges))


def clear_route(inst: Instance, sol: Solution, p: int) -> None:
    route = sol.routes[p]
    kinds = inst.kinds
    for el in route:
        k = kinds[el.node]
        if k is NodeKind.ORIGIN:
            sol.pool_f(inst.f_order_of[el.node])
        elif k is NodeKind.BARGE:
            sol.free(el.node)
    pending: dict = {}
    for el in route:
        k = kinds[el.node]
        if k is NodeKind.BARGE:
            pending[el.order] = pending.get(el.order, 0) + 1
        elif k is NodeKind.E_DESTINATION:
            j = inst.e_order_of[el.node]
            sol.pool_e(j, pending.pop(j, 0))
    sol.routes[p] = []


def _route_losses(ev: Evaluator, sol: Solution) -> list[float]:
    return [ev.route_loss(p, r) for p, r in enumerate(sol.routes)]


def _max_route(losses: list[float], allowed: list[int]) -> int:
    return max(allowed, key=lambda p: (losses[p], -p))


# ---------------------------------------------------------------------------
# operators


def frr(inst: Instance, sol: Solution, step: int | None, rng: random.Random, penalties: PenaltyConfig | None = None) -> Solution:
    """Remove ``step`` random typeF orders."""
    out = sol.copy()
    routed = routed_f(inst, out)
    m = _steps(step, len(routed))
    for k in rng.sample(routed, m):
        remove_f(inst, out, k)
    return out


def fgr(inst: Instance, sol: Solution, step: int | None, rng: random.Random, penalties: PenaltyConfig | None = None) -> Solution:
    """On the costliest route holding typeF orders, remove the order whose removal saves most; repeat."""
    ev = Evaluator.of(inst, penalties)
    out = sol.copy()
    m = _steps(step, len(routed_f(inst, out)))
    kinds = inst.kinds
    for _ in range(m):
        losses = _route_losses(ev, out)
        with_f = [p for p, r in enumerate(out.routes) if any(kinds[el.node] is NodeKind.ORIGIN for el in r)]
        if not with_f:
            break
        p = _max_route(losses, with_f)
        ks = sorted(inst.f_order_of[el.node] for el in out.routes[p] if kinds[el.node] is NodeKind.ORIGIN)
        gains = [(losses[p] - ev.route_loss(p, without_f(inst, out.routes[p], k)), k) for k in ks]
        k = max(gains, key=lambda g: (g[0], -g[1]))[1]
        remove_f(inst, out, k)
    return out


def err(inst: Instance, sol: Solution, step: int | None, rng: random.Random, penalties: PenaltyConfig | None = None) -> Solution:
    """Remove ``step`` random typeE calls together with the barges they drop."""
    out = sol.copy()
    calls = e_calls(inst, out)
    m = _steps(step, len(calls))
    # a removal can shift earlier positions (interleaved trips) but never the
    # rank of earlier calls on the route, so resolve positions by rank
    rank = {c: sum(1 for q in calls if q[0] == c[0] and q[1] < c[1]) for c in calls}
    for p, pos in sorted(rng.sample(calls, m), reverse=True):
        pos = [qpos for q, qpos in e_calls(inst, out) if q == p][rank[(p, pos)]]
        remove_call(inst, out, p, pos)
    return out


def egr(inst: Instance, sol: Solution, step: int | None, rng: random.Random, penalties: PenaltyConfig | None = None) -> Solution:
    """Greedy counterpart of :func:`err` on the costliest route with typeE calls."""
    ev = Evaluator.of(inst, penalties)
    out = sol.copy()
    m = _steps(step, len(e_calls(inst, out)))
    for _ in range(m):
        calls = e_calls(inst, out)
        if not calls:
            break
        losses = _route_losses(ev, out)
        p = _max_route(losses, sorted({c[0] for c in calls}))
        gains = []
        for q, pos in calls:
            if q != p:
                continue
            rest, _ = without_call(inst, out.routes[p], pos)
            gains.append((losses[p] - ev.route_loss(p, rest), pos))
        pos = max(gains, key=lambda g: (g[0], -g[1]))[1]
        remove_call(inst, out, p, pos)
    return out


def rrr(inst: Instance, sol: Solution, step: int | None, rng: random.Random, penalties: PenaltyConfig | None = None) -> Solution:
    """Empty ``step`` random non-empty routes."""
    out = sol.copy()
    busy = [p for p, r in enumerate(out.routes) if r]
    m = _steps(step, len(busy))
    for p in sorted(rng.sample(busy, m)):
        clear_route(inst, out, p)
    return out


def rgr(inst: Instance, sol: Solution, step: int | None, rng: random.Random, penalties: PenaltyConfig | None = None) -> Solution:
    """Empty the costliest route; repeat ``step`` times."""
    ev = Evaluator.of(inst, penalties)
    out = sol.copy()
    m = _steps(step, sum(1 for r in out.routes if r))
    for _ in range(m):
        busy = [p for p, r in enumerate(out.routes) if r]
        if not busy:
            break
        losses = _route_losses(ev, out)
        clear_route(inst, out, _max_route(losses, busy))
    return out


DestroyOp = Callable[..., Solution]

DESTROY_OPS: dict[str, DestroyOp] = {"FRR": frr, "FGR": fgr, "ERR": err, "EGR": egr, "RRR": rrr, "RGR": rgr}


def removable(inst: Instance, sol: Solution, name: str) -> int:
    """How many entities operator ``name`` could remove from ``sol``."""
    if name in ("FRR", "FGR"):
        return len(routed_f(inst, sol))
    if name in ("ERR", "EGR"):
        return len(e_calls(inst, sol))
    return sum(1 for r in sol.routes if r)
