"""Exhaustive enumeration for desk-size instances.

Every order assignment is enumerated (typeF orders to tugboats; typeE
orders to one or two tugboats with one or two calls each, with every way of
sharing barges between the calls), then each tugboat's elements are put in
every order allowed by pickup-before-delivery and trip precedence, pruning
on capacity and closing times.

The route simulation and the feasibility rules here are written
independently of the evaluation and validator modules so the three can be
checked against each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import Infeasible, TooLarge
from .evaluation import LossBreakdown
from .model import Instance, NodeKind
from .solution import RouteElement, Solution

TOL = 1e-6


@dataclass(frozen=True)
class _Visit:
    order: int
    index: int  # 1 or 2 within the tugboat
    barges: frozenset[int]


def _guard(inst: Instance, max_nodes: int) -> None:
    if inst.non_virtual_count() > max_nodes:
        raise TooLarge(f"{inst.non_virtual_count()} non-virtual nodes exceed the limit of {max_nodes}")


# ---------------------------------------------------------------------------
# independent route simulation


def _route_cost(inst: Instance, p: int, nodes: list[int]) -> tuple[float, float]:
    tug = inst.tugboats[p]
    tm, dm = inst.network.travel_time, inst.network.distance
    path = [inst.source] + nodes + [inst.sink]
    tt = sum(float(tm[a, b]) for a, b in zip(path, path[1:]))
    dd = sum(float(dm[a, b]) for a, b in zip(path, path[1:]))
    return tug.cost_per_time * tt, tug.cost_per_distance * dd


def _route_feasible(inst: Instance, p: int, route: list[RouteElement]) -> bool:
    """Capacity, trips, time windows and working time of a single route."""
    tm = inst.network.travel_time
    kinds = inst.kinds
    K = inst.capacity
    clock = 0.0
    prev = inst.source
    towed_full = 0
    tagged: dict[int, int] = {}
    calls: dict[int, int] = {}
    for el in route:
        node = el.node
        if node in (inst.source, inst.sink) or not 0 <= node < inst.n_nodes:
            return False
        kind = kinds[node]
        clock += float(tm[prev, node])
        if kind is NodeKind.ORIGIN:
            o = inst.orders_f[inst.f_order_of[node]]
            lo, hi = o.origin_window
            towed_full += 1
            if el.visit != 1:
                return False
        elif kind is NodeKind.DESTINATION:
            o = inst.orders_f[inst.f_order_of[node]]
            lo, hi = o.destination_window
            towed_full -= 1
            if towed_full < 0 or el.visit != 1:
                return False
        elif kind is NodeKind.BARGE:
            b = inst.barges[node - inst.barge_nodes[0]]
            lo, hi = b.window
            lo = max(lo, b.idle_until)
            if el.order is None or not 0 <= el.order < len(inst.orders_e) or el.visit != 1:
                return False
            tagged[el.order] = tagged.get(el.order, 0) + 1
        else:
            j = inst.e_order_of[node]
            lo, hi = inst.orders_e[j].window
            calls[j] = calls.get(j, 0) + 1
            if el.visit != calls[j] or calls[j] > 2:
                return False
            if el.order is not None and el.order != j:
                return False
            if tagged.get(j, 0) == 0:
                return False
            tagged[j] = 0
        if clock > hi + TOL:
            return False
        if clock < lo:
            clock = lo
        if towed_full + sum(tagged.values()) > K:
            return False
        prev = node
    if towed_full != 0 or any(tagged.values()):
        return False
    clock += float(tm[prev, inst.sink])
    return clock <= inst.tugboats[p].max_working_time + TOL


def feasible(inst: Instance, sol: Solution) -> bool:
    """Independent feasibility verdict for a complete routing."""
    where: dict[int, list[tuple[int, int]]] = {}
    for p, r in enumerate(sol.routes):
        for pos, el in enumerate(r):
            if not 0 <= el.node < inst.n_nodes:
                return False
            where.setdefault(el.node, []).append((p, pos))
    for o in inst.orders_f:
        a, b = where.get(o.origin, []), where.get(o.destination, [])
        if len(a) != 1 or len(b) != 1 or a[0][0] != b[0][0] or a[0][1] > b[0][1]:
            return False
    for b in inst.barge_nodes:
        if len(where.get(b, [])) > 1:
            return False
    for j, o in enumerate(inst.orders_e):
        calls = where.get(o.destination, [])
        tugs = {p for p, _ in calls}
        if not 1 <= len(tugs) <= 2:
            return False
        received = 0
        for p in tugs:
            for el in sol.routes[p]:
                if inst.kinds[el.node] is NodeKind.BARGE and el.order == j:
                    received += 1
        dangling = sum(
            1 for p, r in enumerate(sol.routes) if p not in tugs for el in r
            if inst.kinds[el.node] is NodeKind.BARGE and el.order == j
        )
        if dangling or received != o.required_barges:
            return False
    return all(_route_feasible(inst, p, r) for p, r in enumerate(sol.routes))


def breakdown(inst: Instance, sol: Solution) -> LossBreakdown:
    ct = cd = 0.0
    for p, r in enumerate(sol.routes):
        a, b = _route_cost(inst, p, [el.node for el in r])
        ct += a
        cd += b
    return LossBreakdown(time_cost=ct, distance_cost=cd)


# ---------------------------------------------------------------------------
# assignments


def _e_patterns(P: int) -> list[tuple[int, ...]]:
    """Calls per tugboat for one typeE order: one or two tugboats, at most two calls each."""
    out = []
    for counts in itertools.product(range(3), repeat=P):
        used = sum(1 for c in counts if c)
        if 1 <= used <= 2:
            out.append(counts)
    return out


def _barge_shares(barges: list[int], slots: list[tuple[int, int]], q: int) -> Iterator[dict]:
    """Every way to give each call at least one barge, ``q`` barges in total."""
    options = [None] + list(range(len(slots)))
    for pick in itertools.product(options, repeat=len(barges)):
        used = [x for x in pick if x is not None]
        if len(used) != q or len(set(used)) != len(slots):
            continue
        share: dict[int, set] = {i: set() for i in range(len(slots))}
        for b, x in zip(barges, pick):
            if x is not None:
                share[x].add(b)
        yield {slots[i]: frozenset(s) for i, s in share.items()}


def _e_assignments(inst: Instance) -> Iterator[tuple[dict[int, list[_Visit]], frozenset[int]]]:
    """Per-tugboat typeE calls for every order, plus the set of barges left free."""
    P = inst.n_tugboats
    barges = list(inst.barge_nodes)

    def rec(j: int, free: list[int], acc: dict[int, list[_Visit]]):
        if j == len(inst.orders_e):
            yield {p: list(v) for p, v in acc.items()}, frozenset(free)
            return
        q = inst.orders_e[j].required_barges
        for counts in _e_patterns(P):
            slots = [(p, t) for p in range(P) for t in range(1, counts[p] + 1)]
            if len(slots) > q:
                continue
            for share in _barge_shares(free, slots, q):
                taken = set().union(*share.values())
                nxt = {p: list(v) for p, v in acc.items()}
                for (p, t), bs in share.items():
                    nxt.setdefault(p, []).append(_Visit(j, t, bs))
                yield from rec(j + 1, [b for b in free if b not in taken], nxt)

    yield from rec(0, barges, {})


# ---------------------------------------------------------------------------
# per-tugboat sequencing


def _sequences(inst: Instance, p: int, f_orders: tuple[int, ...], visits: tuple[_Visit, ...]) -> list[tuple[tuple[RouteElement, ...], float, float]]:
    """All feasible orderings of one tugboat's elements with their (time, distance) costs."""
    tm = inst.network.travel_time
    K = inst.capacity
    tmax = inst.tugboats[p].max_working_time
    elems: list[tuple[RouteElement, tuple[int, ...], float, float, int]] = []
    # (element, indices it must follow, ready, latest, load change)
    idx: dict = {}
    for k in f_orders:
        o = inst.orders_f[k]
        idx[("o", k)] = len(elems)
        elems.append((RouteElement(o.origin), (), o.origin_window[0], o.origin_window[1], 1))
        elems.append((RouteElement(o.destination), (idx[("o", k)],), o.destination_window[0], o.destination_window[1], -1))
    for vis in sorted(visits, key=lambda x: (x.order, x.index)):
        prev_call = idx.get(("h", vis.order, vis.index - 1))
        before = () if prev_call is None else (prev_call,)
        members = []
        for b in sorted(vis.barges):
            bb = inst.barges[b - inst.barge_nodes[0]]
            members.append(len(elems))
            elems.append((RouteElement(b, 1, vis.order), before, max(bb.window[0], bb.idle_until), bb.window[1], 1))
        o = inst.orders_e[vis.order]
        idx[("h", vis.order, vis.index)] = len(elems)
        elems.append((RouteElement(o.destination, vis.index, vis.order), tuple(members) + before, o.window[0], o.window[1], -len(vis.barges)))
    n = len(elems)
    out = []
    seq: list[int] = []
    used = [False] * n

    def dfs(prev: int, clock: float, load: int):
        if len(seq) == n:
            fin = clock + float(tm[prev, inst.sink])
            if fin <= tmax + TOL:
                route = tuple(elems[i][0] for i in seq)
                out.append((route, *_route_cost(inst, p, [e.node for e in route])))
            return
        for i in range(n):
            if used[i]:
                continue
            el, before, ready, latest, change = elems[i]
            if any(not used[b] for b in before):
                continue
            if load + change > K:
                continue
            arr = clock + float(tm[prev, el.node])
            if arr > latest + TOL:
                continue
            used[i] = True
            seq.append(i)
            dfs(el.node, max(arr, ready), load + change)
            seq.pop()
            used[i] = False

    dfs(inst.source, 0.0, 0)
    return out


def _assignments(inst: Instance):
    P = inst.n_tugboats
    nf = len(inst.orders_f)
    for e_assign, free in _e_assignments(inst):
        for f_assign in itertools.product(range(P), repeat=nf):
            per = []
            for p in range(P):
                fs = tuple(k for k in range(nf) if f_assign[k] == p)
                vs = tuple(sorted(e_assign.get(p, []), key=lambda x: (x.order, x.index)))
                per.append((fs, vs))
            yield per, free


def enumerate_solutions(inst: Instance, max_nodes: int = 12) -> Iterator[tuple[Solution, LossBreakdown]]:
    """Every feasible complete solution with its loss breakdown."""
    _guard(inst, max_nodes)
    memo: dict = {}
    for per, free in _assignments(inst):
        choices = []
        for p, (fs, vs) in enumerate(per):
            key = (p, fs, vs)
            if key not in memo:
                memo[key] = _sequences(inst, p, fs, vs)
            choices.append(memo[key])
        for combo in itertools.product(*choices):
            sol = Solution(routes=[list(r) for r, _, _ in combo], free_barges=sorted(free))
            yield sol, LossBreakdown(time_cost=sum(c[1] for c in combo), distance_cost=sum(c[2] for c in combo))


def optimum(inst: Instance, max_nodes: int = 12) -> tuple[Solution, float]:
    """Minimum-loss feasible solution; ties broken by the smallest route encoding."""
    _guard(inst, max_nodes)
    memo: dict = {}
    best = None
    for per, free in _assignments(inst):
        total = 0.0
        routes = []
        for p, (fs, vs) in enumerate(per):
            key = (p, fs, vs)
            if key not in memo:
                seqs = _sequences(inst, p, fs, vs)
                if seqs:
                    lo = min(c1 + c2 for _, c1, c2 in seqs)
                    memo[key] = (lo, min(r for r, c1, c2 in seqs if c1 + c2 <= lo + 1e-9))
                else:
                    memo[key] = None
            got = memo[key]
            if got is None:
                break
            total += got[0]
            routes.append(got[1])
        else:
            enc = tuple(routes)
            if best is None or total < best[0] - 1e-9 or (abs(total - best[0]) <= 1e-9 and enc < best[1]):
                best = (total, enc, free)
    if best is None:
        raise Infeasible("no feasible solution exists")
    total, enc, free = best
    return Solution(routes=[list(r) for r in enc], free_barges=sorted(free)), total


# ---------------------------------------------------------------------------
# unfiltered candidates, for cross-checking feasibility verdicts


def enumerate_candidates(inst: Instance, max_nodes: int = 7) -> Iterator[tuple[Solution, bool]]:
    """Every routing of the nodes onto tugboats in every order, with the oracle's verdict.

    typeF endpoints go to any tugboat independently, barges are left free or
    sent to any tugboat, each tugboat calls 0-2 times at every typeE
    destination, and each tugboat's elements are taken in every permutation.
    No structural rule is applied before the verdict.
    """
    _guard(inst, max_nodes)
    P = inst.n_tugboats
    f_nodes = [n for o in inst.orders_f for n in (o.origin, o.destination)]
    barges = list(inst.barge_nodes)
    n_e = len(inst.orders_e)
    barge_opts = [None] + [(j, p) for j in range(n_e) for p in range(P)]
    for f_pick in itertools.product(range(P), repeat=len(f_nodes)):
        for b_pick in itertools.product(barge_opts, repeat=len(barges)):
            for calls in itertools.product(range(3), repeat=n_e * P):
                per: list[list[RouteElement]] = [[] for _ in range(P)]
                for node, p in zip(f_nodes, f_pick):
                    per[p].append(RouteElement(node))
                free = []
                for b, pick in zip(barges, b_pick):
                    if pick is None:
                        free.append(b)
                    else:
                        per[pick[1]].append(RouteElement(b, 1, pick[0]))
                for j in range(n_e):
                    for p in range(P):
                        for _ in range(calls[j * P + p]):
                            per[p].append(RouteElement(inst.orders_e[j].destination, 1, j))
                for routes in itertools.product(*(_distinct_perms(r) for r in per)):
                    routes = [_number_calls(inst, r) for r in routes]
                    sol = Solution(routes=routes, free_barges=free)
                    yield sol, feasible(inst, sol)


def _distinct_perms(items: list[RouteElement]) -> list[tuple[RouteElement, ...]]:
    return sorted(set(itertools.permutations(items)))


def _number_calls(inst: Instance, route) -> list[RouteElement]:
    seen: dict[int, int] = {}
    out = []
    for el in route:
        if inst.kinds[el.node] is NodeKind.E_DESTINATION:
            seen[el.node] = seen.get(el.node, 0) + 1
            el = el._replace(visit=seen[el.node])
        out.append(el)
    return out
