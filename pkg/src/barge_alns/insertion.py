"""Incremental insertion costs on earliest-start routes.

A :class:`RouteState` caches arrival/departure times, waiting, loads and a
suffix bound that lets an insertion's penalty change be computed in O(1)
in the common case.  When a time shift of ``delta`` hours reaches element
``m`` it is absorbed by the waiting in between, so the shift arriving at
``m`` is ``max(0, D - CW[m])`` with ``D = delta + CW[a]`` and ``CW`` the
cumulative waiting.  Lateness at ``m`` then grows by ``max(0, D - U[m])``
with ``U[m] = CW[m] + max(0, L[m] - arr[m])``; if ``D`` does not exceed the
suffix minimum of ``U`` nothing downstream changes.

Positions follow list-insertion semantics: inserting at ``i`` puts the new
element before the current element ``i`` (``i == len(route)`` appends).
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass

from .model import INF, Instance, NodeKind, PenaltyConfig
from .solution import Route, RouteElement, Solution, renumber_h_visits

EPS = 1e-9


class RouteState:
    """Cached earliest-start schedule of one route."""

    __slots__ = (
        "p", "route", "n", "nodes", "arr", "dep", "wait", "load", "cw", "up", "sufmin",
        "dirty", "finish", "over", "late", "cost", "loss",
    )

    def __init__(self, ev: "Evaluator", p: int, route: Route):
        inst = ev.inst
        t = ev.t
        ac = ev.arc_cost[p]
        ready = ev.ready
        latest = ev.latest
        kinds = ev.kinds
        e_order_of = inst.e_order_of
        self.p = p
        self.route = route
        n = self.n = len(route)
        nodes = self.nodes = [el.node for el in route]
        arr = [0.0] * (n + 1)
        dep = [0.0] * n
        wait = [0.0] * n
        load = [0] * n
        cw = [0.0] * (n + 1)
        up = [INF] * n
        prev = ev.source
        clock = 0.0
        towed = 0
        cost = 0.0
        late = 0.0
        acc_wait = 0.0
        pending: dict = {}
        for m in range(n):
            node = nodes[m]
            a = clock + t[prev][node]
            cost += ac[prev][node]
            r = ready[node]
            w = r - a if r > a else 0.0
            kind = kinds[node]
            if kind is NodeKind.ORIGIN:
                towed += 1
            elif kind is NodeKind.DESTINATION:
                towed -= 1
            elif kind is NodeKind.BARGE:
                towed += 1
                o = route[m].order
                pending[o] = pending.get(o, 0) + 1
            elif kind is NodeKind.E_DESTINATION:
                towed -= pending.pop(e_order_of[node], 0)
            arr[m] = a
            wait[m] = w
            dep[m] = a + w
            load[m] = towed
            cw[m] = acc_wait
            slack = latest[node] - a
            if slack < 0:
                late -= slack
                up[m] = acc_wait
            else:
                up[m] = acc_wait + slack
            acc_wait += w
            clock = a + w
            prev = node
        arr[n] = clock + t[prev][ev.sink]
        cost += ac[prev][ev.sink]
        cw[n] = acc_wait
        self.arr, self.dep, self.wait, self.load, self.cw, self.up = arr, dep, wait, load, cw, up
        suf = [INF] * (n + 1)
        dirty = [False] * (n + 1)
        tmax = ev.max_time[p]
        self.finish = arr[n]
        self.over = arr[n] - tmax if arr[n] > tmax else 0.0
        dirty[n] = self.over > 0
        for m in range(n - 1, -1, -1):
            suf[m] = up[m] if up[m] < suf[m + 1] else suf[m + 1]
            dirty[m] = dirty[m + 1] or arr[m] > latest[nodes[m]]
        self.sufmin = suf
        self.dirty = dirty
        self.late = late
        self.cost = cost
        self.loss = cost + ev.lam_tw * late + ev.lam_h * self.over

    def load_before(self, i: int) -> int:
        return self.load[i - 1] if i > 0 else 0


@dataclass
class EVisit:
    """One typeE visit: a contiguous block ``chain + [destination]`` put at ``pos`` of route ``p``."""

    p: int
    pos: int
    chain: tuple[int, ...]


@dataclass
class EPlan:
    order: int
    visits: list[EVisit]
    delta: float

    @property
    def barges(self) -> int:
        return sum(len(v.chain) for v in self.visits)


class Evaluator:
    """Per-instance lookup tables plus route-level insertion arithmetic."""

    def __init__(self, inst: Instance, penalties: PenaltyConfig | None = None):
        self.inst = inst
        pen = penalties or inst.penalties
        self.penalties = pen
        self.lam_tw = pen.time_window
        self.lam_h = pen.working_hours
        self.lam_u = pen.unserved
        self.t = inst.t
        self.arc_cost = inst.arc_cost
        self.ready = inst.ready
        self.latest = inst.latest
        self.kinds = inst.kinds
        self.source = inst.source
        self.sink = inst.sink
        self.K = inst.capacity
        self.max_time = [tug.max_working_time for tug in inst.tugboats]
        self.h_node = [o.destination for o in inst.orders_e]
        # nodes sharing a travel-time row behave identically as chain starts
        rows: dict = {}
        self.location = [rows.setdefault(tuple(row), len(rows)) for row in self.t]
        self._chains: dict = {}

    _cache: "weakref.WeakKeyDictionary[Instance, dict]" = weakref.WeakKeyDictionary()

    @classmethod
    def of(cls, inst: Instance, penalties: PenaltyConfig | None = None) -> "Evaluator":
        per = cls._cache.setdefault(inst, {})
        key = penalties or inst.penalties
        ev = per.get(key)
        if ev is None:
            ev = per[key] = cls(inst, penalties)
        return ev

    # -- states ----------------------------------------------------------------
    def state(self, p: int, route: Route) -> RouteState:
        return RouteState(self, p, route)

    def states(self, sol: Solution) -> list[RouteState]:
        return [RouteState(self, p, r) for p, r in enumerate(sol.routes)]

    def route_loss(self, p: int, route: Route) -> float:
        return RouteState(self, p, route).loss

    def unserved(self, sol: Solution) -> float:
        pending = [c for c in sol.unassigned_e.values() if c > 0]
        return self.lam_u * (len(sol.unassigned_f) + len(pending) + sum(pending))

    def total(self, sol: Solution, states: list[RouteState] | None = None) -> float:
        states = states or self.states(sol)
        return sum(st.loss for st in states) + self.unserved(sol)

    # -- shifting the tail of a route ------------------------------------------
    def _tail(self, st: RouteState, a: int, delta: float) -> tuple[float, float] | None:
        """(extra lateness, new overrun) when arrival at element ``a`` moves by ``delta``.

        ``a == st.n`` denotes the sink.  Returns None when an exact answer
        needs a full re-simulation (earlier arrival on a penalised suffix).
        """
        if delta <= 0.0:
            if delta < 0.0 and st.dirty[a]:
                return None
            return 0.0, st.over
        D = delta + st.cw[a]
        inc = 0.0
        if D > st.sufmin[a]:
            up = st.up
            for m in range(a, st.n):
                x = D - up[m]
                if x > 0.0:
                    inc += x
        ds = D - st.cw[st.n]
        if ds > 0.0:
            fin = st.finish + ds
            tmax = self.max_time[st.p]
            return inc, (fin - tmax if fin > tmax else 0.0)
        return inc, st.over

    def _slow(self, st: RouteState, new_route: Route) -> float:
        return RouteState(self, st.p, new_route).loss - st.loss

    # -- typeF pairs -------------------------------------------------------------
    def f_candidates(self, st: RouteState, k: int) -> list[tuple[float, int, int]]:
        """Every capacity-feasible (delta, i, j) for inserting order ``k`` into ``st``.

        The origin goes to position ``i`` and the destination right before the
        current element ``j`` (``j >= i``); ``j == i`` keeps them adjacent.
        """
        order = self.inst.orders_f[k]
        o, d = order.origin, order.destination
        t = self.t
        ac = self.arc_cost[st.p]
        K = self.K
        ready_o, ready_d = self.ready[o], self.ready[d]
        L_o, L_d = self.latest[o], self.latest[d]
        lam, lam_h = self.lam_tw, self.lam_h
        n = st.n
        nodes, arr, dep, wait, load, cw, up = st.nodes, st.arr, st.dep, st.wait, st.load, st.cw, st.up
        base_over = st.over
        dirty, sufmin, cw_n = st.dirty, st.sufmin, st.cw[n]
        sink = self.sink
        t_o, t_d = t[o], t[d]
        ac_o, ac_d = ac[o], ac[d]
        t_od = t_o[d]
        ac_od = ac_o[d]
        out = []
        for i in range(n + 1):
            if i == 0:
                prev, dep_prev, load_prev = self.source, 0.0, 0
            else:
                prev, dep_prev, load_prev = nodes[i - 1], dep[i - 1], load[i - 1]
            if load_prev + 1 > K:
                continue
            nxt = nodes[i] if i < n else sink
            arr_o = dep_prev + t[prev][o]
            dep_o = arr_o if arr_o >= ready_o else ready_o
            pen_o = arr_o - L_o if arr_o > L_o else 0.0
            c_prev_nxt = ac[prev][nxt]
            ac_prev_o = ac[prev][o]
            # adjacent pair
            arr_d = dep_o + t_od
            dep_d = arr_d if arr_d >= ready_d else ready_d
            pen_d = arr_d - L_d if arr_d > L_d else 0.0
            cost = ac_prev_o + ac_od + ac_d[nxt] - c_prev_nxt
            dl = dep_d + t_d[nxt] - arr[i]
            if (dl <= 0.0 and not (dl < 0.0 and dirty[i])) or (dl > 0.0 and dl + cw[i] <= sufmin[i] and dl + cw[i] <= cw_n):
                out.append((cost + lam * (pen_o + pen_d), i, i))
            else:
                tail = self._tail(st, i, dl)
                if tail is None:
                    out.append((self._slow(st, _with_pair(st.route, i, i, o, d)), i, i))
                else:
                    out.append((cost + lam * (pen_o + pen_d + tail[0]) + lam_h * (tail[1] - base_over), i, i))
            if i == n:
                continue
            first = nodes[i]
            d1 = dep_o + t_o[first] - arr[i]
            if d1 < 0.0:
                if st.dirty[i]:
                    for j in range(i + 1, n + 1):
                        if load[j - 1] + 1 > K:
                            break
                        out.append((self._slow(st, _with_pair(st.route, i, j, o, d)), i, j))
                    continue
                d1 = 0.0
            D1 = d1 + cw[i]
            cost_o = ac_prev_o + ac_o[first] - c_prev_nxt
            mid = 0.0
            for j in range(i + 1, n + 1):
                m = j - 1
                if load[m] + 1 > K:
                    break
                x = D1 - up[m]
                if x > 0.0:
                    mid += x
                dm = D1 - cw[m]
                extra = dm - wait[m]
                dep_m = dep[m] + extra if extra > 0.0 else dep[m]
                pm = nodes[m]
                nxt = nodes[j] if j < n else sink
                arr_d = dep_m + t[pm][d]
                dep_d = arr_d if arr_d >= ready_d else ready_d
                pen_d = arr_d - L_d if arr_d > L_d else 0.0
                cost = cost_o + ac[pm][d] + ac_d[nxt] - ac[pm][nxt]
                dl = dep_d + t_d[nxt] - arr[j]
                if (dl <= 0.0 and not (dl < 0.0 and dirty[j])) or (dl > 0.0 and dl + cw[j] <= sufmin[j] and dl + cw[j] <= cw_n):
                    out.append((cost + lam * (pen_o + mid + pen_d), i, j))
                    continue
                tail = self._tail(st, j, dl)
                if tail is None:
                    out.append((self._slow(st, _with_pair(st.route, i, j, o, d)), i, j))
                    continue
                out.append((cost + lam * (pen_o + mid + pen_d + tail[0]) + lam_h * (tail[1] - base_over), i, j))
        return out

    # -- typeE blocks --------------------------------------------------------------
    def block_delta(self, st: RouteState, i: int, h: int, chain) -> float:
        """Loss change of putting ``chain`` barges and then ``h`` at position ``i``."""
        t = self.t
        ac = self.arc_cost[st.p]
        ready, latest = self.ready, self.latest
        if i == 0:
            pos, clock = self.source, 0.0
        else:
            pos, clock = st.nodes[i - 1], st.dep[i - 1]
        nxt = st.nodes[i] if i < st.n else self.sink
        cost = -ac[pos][nxt]
        pen = 0.0
        for b in chain:
            a = clock + t[pos][b]
            cost += ac[pos][b]
            if a > latest[b]:
                pen += a - latest[b]
            clock = a if a >= ready[b] else ready[b]
            pos = b
        a = clock + t[pos][h]
        cost += ac[pos][h] + ac[h][nxt]
        if a > latest[h]:
            pen += a - latest[h]
        clock = a if a >= ready[h] else ready[h]
        tail = self._tail(st, i, clock + t[h][nxt] - st.arr[i])
        if tail is None:
            return self._slow(st, _with_block(st.route, i, chain, h, self.inst.e_order_of[h]))
        return cost + self.lam_tw * (pen + tail[0]) + self.lam_h * (tail[1] - st.over)

    def block_positions(self, st: RouteState, j: int, nk: int) -> list[int]:
        """Positions where a block of ``nk`` barges for order ``j`` fits."""
        K = self.K
        out = []
        towing = 0
        load = st.load
        h = self.h_node[j]
        for i in range(st.n + 1):
            if i > 0:
                el = st.route[i - 1]
                if el.order == j:
                    towing = 0 if el.node == h else towing + 1
            if towing == 0 and (load[i - 1] if i > 0 else 0) + nk <= K:
                out.append(i)
        return out

    def chain_from(self, start: int, nk: int, free: tuple[int, ...]) -> tuple[int, ...]:
        """Nearest-barge-first chain of ``nk`` free barges starting at ``start``."""
        key = (self.location[start], nk, free)
        got = self._chains.get(key)
        if got is not None:
            return got
        if len(self._chains) > 20000:
            self._chains.clear()
        t = self.t
        avail = list(free)
        chosen = []
        cur = start
        for _ in range(nk):
            row = t[cur]
            best = min(avail, key=lambda b: (row[b], b))
            avail.remove(best)
            chosen.append(best)
            cur = best
        got = self._chains[key] = tuple(chosen)
        return got

    def block_candidates(self, st: RouteState, j: int, nk: int, free: tuple[int, ...]) -> list[tuple[float, int, tuple[int, ...]]]:
        h = self.h_node[j]
        out = []
        for i in self.block_positions(st, j, nk):
            start = st.nodes[i - 1] if i > 0 else self.source
            chain = self.chain_from(start, nk, free)
            out.append((self.block_delta(st, i, h, chain), i, chain))
        return out

    def polish(self, st: RouteState, i: int, j: int, chain: tuple[int, ...], free: tuple[int, ...], delta: float):
        """Swap barges in or out of a block, and within it, at a fixed position."""
        h = self.h_node[j]
        chain = list(chain)
        for _ in range(3):
            improved = False
            for idx in range(len(chain)):
                for b in free:
                    if b in chain:
                        continue
                    old = chain[idx]
                    chain[idx] = b
                    v = self.block_delta(st, i, h, chain)
                    if v < delta - 1e-9:
                        delta = v
                        improved = True
                    else:
                        chain[idx] = old
            # reorder the pickups
            for a in range(len(chain)):
                for b in range(a + 1, len(chain)):
                    chain[a], chain[b] = chain[b], chain[a]
                    v = self.block_delta(st, i, h, chain)
                    if v < delta - 1e-9:
                        delta = v
                        improved = True
                    else:
                        chain[a], chain[b] = chain[b], chain[a]
            if not improved:
                break
        return delta, tuple(chain)

    # -- typeE plans ------------------------------------------------------------------
    def e_slots(self, sol: Solution, j: int) -> tuple[dict[int, int], int]:
        """Remaining visits per already-serving tugboat and how many new tugboats may join."""
        h = self.h_node[j]
        slots = {}
        for p, r in enumerate(sol.routes):
            c = sum(1 for el in r if el.node == h)
            if c:
                slots[p] = max(0, 2 - c)
        return slots, max(0, 2 - len(slots))

    def e_plans(self, sol: Solution, states: list[RouteState], j: int, r: int) -> list[EPlan]:
        """Candidate insertion plans for ``r`` pooled barges of order ``j``.

        A single visit is enough when ``r <= K``; every (tugboat, position)
        is then a candidate.  Otherwise the barges are split over
        ``ceil(r / K)`` visits on at most two tugboats (at most two visits each),
        trying the allowed tugboat allocations with a few barge splits, and
        placing visits one after the other at their best position.
        """
        K = self.K
        free = tuple(sol.free_barges)
        slots, new_allowed = self.e_slots(sol, j)
        P = len(sol.routes)
        v = max(1, math.ceil(r / K))
        last = min(4, r, v + 1)
        plans: list[EPlan] = []
        while v <= 4 and (not plans or v <= last):
            allocs = _allocations(P, v, slots, new_allowed)
            if v == 1:
                for (p,) in allocs:
                    for delta, i, chain in self.block_candidates(states[p], j, r, free):
                        plans.append(EPlan(j, [EVisit(p, i, chain)], delta))
            else:
                for alloc in allocs:
                    # the first visit picks its barges first, so try both orders
                    orders = [alloc] if len(set(alloc)) == 1 else [alloc, alloc[::-1]]
                    for al in orders:
                        for split in _splits(r, v, K, same_tug=len(set(al)) < len(al)):
                            plan = self.sequential_plan(sol, states, j, al, split, free)
                            if plan is not None:
                                plans.append(plan)
            v += 1
        return plans

    def sequential_plan(self, sol, states, j, alloc, split, free) -> EPlan | None:
        local = {}
        visits = []
        total = 0.0
        free = list(free)
        h = self.h_node[j]
        for p, nk in zip(alloc, split):
            st = local.get(p) or states[p]
            ft = tuple(free)
            cands = self.block_candidates(st, j, nk, ft)
            if not cands:
                return None
            delta, i, chain = min(cands, key=lambda c: (c[0], c[1]))
            total += delta
            visits.append(EVisit(p, i, chain))
            for b in chain:
                free.remove(b)
            local[p] = RouteState(self, p, _with_block(st.route, i, chain, h, j))
        return EPlan(j, visits, total)

    def finish_plan(self, sol: Solution, states: list[RouteState], plan: EPlan) -> EPlan:
        """1-swap polish of the barges of every visit of the chosen plan, in plan order."""
        j = plan.order
        h = self.h_node[j]
        local: dict[int, RouteState] = {}
        free = list(sol.free_barges)
        visits = []
        total = 0.0
        for n, vis in enumerate(plan.visits):
            st = local.get(vis.p) or states[vis.p]
            later = {b for v in plan.visits[n + 1:] for b in v.chain}
            ft = tuple(b for b in free if b not in later)
            delta = self.block_delta(st, vis.pos, h, vis.chain)
            delta, chain = self.polish(st, vis.pos, j, vis.chain, ft, delta)
            total += delta
            visits.append(EVisit(vis.p, vis.pos, chain))
            for b in chain:
                free.remove(b)
            local[vis.p] = RouteState(self, vis.p, _with_block(st.route, vis.pos, chain, h, j))
        return EPlan(j, visits, total)


# ---------------------------------------------------------------------------
# applying insertions


def _with_pair(route: Route, i: int, j: int, o: int, d: int) -> Route:
    return route[:i] + [RouteElement(o)] + route[i:j] + [RouteElement(d)] + route[j:]


def _with_block(route: Route, i: int, chain, h: int, j: int) -> Route:
    block = [RouteElement(b, 1, j) for b in chain] + [RouteElement(h, 1, j)]
    return route[:i] + block + route[i:]


def insert_f(ev: Evaluator, sol: Solution, states: list[RouteState] | None, k: int, p: int, i: int, j: int) -> None:
    """Insert typeF order ``k`` into route ``p`` (positions as in :meth:`Evaluator.f_candidates`)."""
    o = ev.inst.orders_f[k]
    sol.routes[p] = _with_pair(sol.routes[p], i, j, o.origin, o.destination)
    if k in sol.unassigned_f:
        sol.unassigned_f.remove(k)
    if states is not None:
        states[p] = RouteState(ev, p, sol.routes[p])


def apply_plan(ev: Evaluator, sol: Solution, states: list[RouteState] | None, plan: EPlan) -> None:
    j = plan.order
    h = ev.h_node[j]
    touched = set()
    for vis in plan.visits:
        sol.routes[vis.p] = _with_block(sol.routes[vis.p], vis.pos, vis.chain, h, j)
        for b in vis.chain:
            sol.claim(b)
        touched.add(vis.p)
    sol.take_e(j, plan.barges)
    for p in touched:
        sol.routes[p] = renumber_h_visits(ev.inst, sol.routes[p])
        if states is not None:
            states[p] = RouteState(ev, p, sol.routes[p])


def _allocations(P: int, v: int, slots: dict[int, int], new_allowed: int) -> list[tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(P), v):
        ok = True
        new = set()
        for p in set(combo):
            c = combo.count(p)
            if p in slots:
                if c > slots[p]:
                    ok = False
            else:
                new.add(p)
                if c > 2:
                    ok = False
        if ok and len(new) <= new_allowed:
            out.append(combo)
    return out


def _splits(r: int, v: int, K: int, same_tug: bool = False) -> list[tuple[int, ...]]:
    """A few ways to share ``r`` barges over ``v`` visits of at most ``K`` each."""
    if r < v or r > v * K:
        return []
    base, extra = divmod(r, v)
    balanced = tuple([base + 1] * extra + [base] * (v - extra))
    full = [K] * (v - 1)
    rest = r - K * (v - 1)
    if rest < 1:
        greedy = balanced
    else:
        greedy = tuple(full + [rest])
    cands = [greedy, tuple(reversed(greedy)), balanced, tuple(reversed(balanced))]
    if v == 2 and r <= 4:
        cands = [(a, r - a) for a in range(max(1, r - K), min(K, r - 1) + 1)]
    out = []
    for c in cands:
        if c not in out:
            out.append(c)
    return out
