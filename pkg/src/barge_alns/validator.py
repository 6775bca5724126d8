"""Hard feasibility check of a solution, one tagged violation per broken rule.

Tags name the constraint families of the mathematical model (``C1`` ...
``C32``, with ``C17a``/``C17b`` for the upper and lower load bounds).  The
per-order service rule is checked in its per-order form: each typeE order is
served by one or two tugboats, each calling at most twice.

Without an explicit schedule the earliest-start decode is used, which
satisfies the propagation and boundary families by construction; passing a
``schedule`` additionally checks those families on the supplied numbers.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .evaluation import Schedule, Stop, propagate_route
from .model import Instance, NodeKind
from .solution import Solution

TOL = 1e-6

TAGS = tuple(f"C{i}" for i in range(1, 17)) + ("C17a", "C17b") + tuple(f"C{i}" for i in range(18, 33))


@dataclass(frozen=True)
class Violation:
    tag: str
    magnitude: float
    message: str
    tugboat: int | None = None
    node: int | None = None

    def to_raw(self) -> dict:
        return {"tag": self.tag, "tugboat": self.tugboat, "node": self.node, "magnitude": self.magnitude, "message": self.message}


def validate(inst: Instance, sol: Solution, schedule: Schedule | None = None, tol: float = TOL) -> list[Violation]:
    """Every violated constraint of ``sol`` (empty list iff feasible)."""
    out: list[Violation] = []

    def v(tag: str, mag: float, msg: str, p: int | None = None, node: int | None = None) -> None:
        out.append(Violation(tag, float(mag), msg, p, node))

    n = inst.n_nodes
    kinds = inst.kinds
    K = inst.capacity
    n_e = len(inst.orders_e)
    s, s_end = inst.source, inst.sink

    # node ids and implicit endpoints
    routes = []
    for p, route in enumerate(sol.routes):
        clean = []
        for el in route:
            if not 0 <= el.node < n:
                v("C8", 1, f"node {el.node} does not exist", p, el.node)
                continue
            clean.append(el)
        routes.append(clean)
    for p, route in enumerate(routes):
        for el in route:
            if el.node == s:
                v("C1", 1, "virtual start inside a route", p, el.node)
            elif el.node == s_end:
                v("C2", 1, "virtual sink inside a route", p, el.node)
        real = [el for el in route if el.node not in (s, s_end)]
        if real and kinds[real[0].node] in (NodeKind.DESTINATION, NodeKind.E_DESTINATION):
            v("C1", 1, "route cannot start at a delivery node", p, real[0].node)
        if real and kinds[real[-1].node] in (NodeKind.ORIGIN, NodeKind.BARGE):
            v("C2", 1, "route cannot end at a pickup node", p, real[-1].node)
    routes = [[el for el in r if el.node not in (s, s_end)] for r in routes]

    # coverage of typeF endpoints and barges
    seen = Counter(el.node for r in routes for el in r)
    where: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for p, r in enumerate(routes):
        for pos, el in enumerate(r):
            where[el.node].append((p, pos))
    for o in inst.orders_f:
        if seen[o.origin] != 1:
            v("C3", abs(seen[o.origin] - 1), f"origin {o.origin} visited {seen[o.origin]} times", node=o.origin)
        if seen[o.destination] != 1:
            v("C4", abs(seen[o.destination] - 1), f"destination {o.destination} visited {seen[o.destination]} times", node=o.destination)

    # typeE service pattern
    for j, o in enumerate(inst.orders_e):
        h = o.destination
        per_tug = Counter(p for p, _ in where[h])
        if len(per_tug) > 2:
            v("C5", len(per_tug) - 2, f"typeE order {j} served by {len(per_tug)} tugboats", node=h)
        for p, c in sorted(per_tug.items()):
            if c > 2:
                v("C5", c - 2, f"tugboat visits typeE destination {h} {c} times", p, h)
    for p, r in enumerate(routes):
        for el in r:
            if kinds[el.node] is NodeKind.E_DESTINATION:
                if el.visit not in (1, 2):
                    v("C5", 1, f"visit index {el.visit} outside {{1, 2}}", p, el.node)
            elif el.visit != 1:
                v("C14", 1, f"visit index {el.visit} on a node visited once", p, el.node)
        first_seen: dict[int, int] = {}
        for pos, el in enumerate(r):
            if kinds[el.node] is not NodeKind.E_DESTINATION:
                continue
            if el.visit == 1:
                if el.node in first_seen:
                    v("C14", 1, f"second call at {el.node} not marked as visit 2", p, el.node)
                first_seen.setdefault(el.node, pos)
            elif el.visit == 2:
                ones = [q for q, e in enumerate(r) if e.node == el.node and e.visit == 1]
                if not ones:
                    v("C14", 1, f"visit 2 at {el.node} without a first visit", p, el.node)
                elif ones[0] > pos:
                    v("C13", 1, f"visit 2 at {el.node} precedes visit 1", p, el.node)

    for b in inst.barge_nodes:
        if seen[b] > 1:
            v("C6", seen[b] - 1, f"barge {b} used {seen[b]} times", node=b)
    for p, r in enumerate(routes):
        for el in r:
            k = kinds[el.node]
            if k is NodeKind.BARGE and (el.order is None or not 0 <= el.order < n_e):
                v("C7", 1, f"barge {el.node} not assigned to a typeE order", p, el.node)
            elif k is NodeKind.E_DESTINATION and el.order is not None and el.order != inst.e_order_of[el.node]:
                v("C7", 1, f"destination {el.node} tagged with order {el.order}", p, el.node)

    # typeF pairing
    for k, o in enumerate(inst.orders_f):
        a, b = where.get(o.origin, []), where.get(o.destination, [])
        if len(a) == 1 and len(b) == 1:
            (pa, ia), (pb, ib) = a[0], b[0]
            if pa != pb:
                v("C9", 1, f"typeF order {k} split over tugboats {pa} and {pb}", pa, o.origin)
            elif ia > ib:
                v("C9", 1, f"typeF order {k} delivered before pickup", pa, o.origin)
        elif len(a) + len(b) == 1:
            v("C9", 1, f"typeF order {k} only half routed", (a or b)[0][0], o.origin)

    # decoded schedule, trips and drop balance
    decoded: list[tuple[list[Stop], float]] = [propagate_route(inst, r, strict=False) for r in routes]
    dropped_total = [0] * n_e
    drops_by_visit: dict[tuple[int, int], dict[int, int]] = defaultdict(dict)
    for p, r in enumerate(routes):
        stops, _ = decoded[p]
        pending: Counter = Counter()
        for el, st in zip(r, stops):
            k = kinds[el.node]
            if k is NodeKind.BARGE and el.order is not None and 0 <= el.order < n_e:
                pending[el.order] += 1
            elif k is NodeKind.E_DESTINATION:
                j = inst.e_order_of[el.node]
                if pending[j] == 0:
                    v("C10", 1, f"call at {el.node} drops no barge", p, el.node)
                dropped_total[j] += pending[j]
                drops_by_visit[(p, j)][el.visit] = drops_by_visit[(p, j)].get(el.visit, 0) + pending[j]
                pending[j] = 0
        for j, c in sorted(pending.items()):
            if c:
                v("C10", c, f"{c} barge(s) for typeE order {j} never dropped", p, inst.orders_e[j].destination)
    for (p, j), d in sorted(drops_by_visit.items()):
        if d.get(2, 0) > 0 and d.get(1, 0) == 0:
            v("C12", d[2], f"second call of typeE order {j} drops while the first drops nothing", p, inst.orders_e[j].destination)
    for j, o in enumerate(inst.orders_e):
        if dropped_total[j] != o.required_barges:
            v("C11", abs(dropped_total[j] - o.required_barges),
              f"typeE order {j} receives {dropped_total[j]} of {o.required_barges} barges", node=o.destination)

    # supplied schedule shape
    use = decoded
    if schedule is not None:
        ok = len(schedule.stops) == len(routes) and len(schedule.finish) == len(routes)
        ok = ok and all(len(schedule.stops[p]) == len(routes[p]) for p in range(min(len(routes), len(schedule.stops))))
        if not ok:
            v("C17b", 1, "schedule does not match the routes")
            schedule = None
        else:
            use = [(schedule.stops[p], schedule.finish[p]) for p in range(len(routes))]
            for p, r in enumerate(routes):
                for el, st, dst in zip(r, schedule.stops[p], decoded[p][0]):
                    if kinds[el.node] is NodeKind.E_DESTINATION and st.dropped != dst.dropped:
                        v("C10", abs(st.dropped - dst.dropped), f"schedule drops {st.dropped} at {el.node}, trip brings {dst.dropped}", p, el.node)

    # working time, readiness, loads, windows
    earliest, latest, idle = inst.earliest, inst.latest, inst.idle_until
    for p, r in enumerate(routes):
        stops, finish = use[p]
        tmax = inst.tugboats[p].max_working_time
        if finish > tmax + tol:
            v("C15", finish - tmax, f"works {finish:.4f} h, limit {tmax}", p)
        for el, st in zip(r, stops):
            k = kinds[el.node]
            start = st.arrival + st.stay
            if k is NodeKind.BARGE and start < idle[el.node] - tol:
                v("C16", idle[el.node] - start, f"barge {el.node} towed before it is idle", p, el.node)
        for el, st in zip(r, decoded[p][0]):
            load = st.full_load + st.empty_load
            if load > K:
                v("C17a", load - K, f"towing {load} barges, capacity {K}", p, el.node)
            if st.full_load < 0 or st.empty_load < 0:
                v("C17b", -min(st.full_load, st.empty_load), "negative load", p, el.node)
        if schedule is not None:
            for el, st in zip(r, stops):
                if st.full_load < 0 or st.empty_load < 0:
                    v("C17b", -min(st.full_load, st.empty_load), "schedule reports a negative load", p, el.node)
                if st.full_load + st.empty_load > K:
                    v("C17a", st.full_load + st.empty_load - K, "schedule reports an overload", p, el.node)
        for el, st in zip(r, stops):
            is_h = kinds[el.node] is NodeKind.E_DESTINATION
            start = st.arrival + st.stay
            if start < earliest[el.node] - tol:
                v("C20" if is_h else "C18", earliest[el.node] - start, f"service at {el.node} starts before its window", p, el.node)
            if st.arrival > latest[el.node] + tol:
                v("C21" if is_h else "C19", st.arrival - latest[el.node], f"arrival at {el.node} after its window", p, el.node)

    if schedule is not None:
        _check_supplied(inst, routes, schedule, tol, v)
    else:
        for p, r in enumerate(routes):
            stops, _ = decoded[p]
            if stops:
                last = stops[-1]
                if last.full_load != 0:
                    v("C31", abs(last.full_load), "route ends with full barges in tow", p)
                if last.empty_load != 0:
                    v("C32", abs(last.empty_load), "route ends with empty barges in tow", p)
    return out


def _check_supplied(inst: Instance, routes, schedule: Schedule, tol: float, v) -> None:
    """Propagation, recursion and boundary families on supplied numbers."""
    t = inst.t
    kinds = inst.kinds
    for p, r in enumerate(routes):
        stops = schedule.stops[p]
        start = schedule.start[p] if p < len(schedule.start) else 0.0
        if abs(start) > tol:
            v("C28", abs(start), "tugboat does not leave the start at time 0", p)
        prev, dep = inst.source, start
        full = empty = 0
        pos_of = {}
        fed: list[int] = []
        pending_by_order: dict[int, list[int]] = defaultdict(list)
        for idx, (el, st) in enumerate(zip(r, stops)):
            need = dep + t[prev][el.node]
            if st.arrival < need - tol:
                v("C22", need - st.arrival, f"arrival at {el.node} earlier than sailing allows", p, el.node)
            k = kinds[el.node]
            if k is NodeKind.DESTINATION:
                o = inst.orders_f[inst.f_order_of[el.node]]
                if o.origin in pos_of:
                    src = stops[pos_of[o.origin]]
                    need_o = src.arrival + src.stay + t[o.origin][el.node]
                    if st.arrival < need_o - tol:
                        v("C23", need_o - st.arrival, f"delivery at {el.node} before the pickup could reach it", p, el.node)
            if k is NodeKind.E_DESTINATION:
                j = inst.e_order_of[el.node]
                for b in pending_by_order.pop(j, []):
                    bs = stops[b]
                    need_b = bs.arrival + bs.stay + t[r[b].node][el.node]
                    if st.arrival < need_b - tol:
                        v("C24", need_b - st.arrival, f"drop at {el.node} before barge {r[b].node} could arrive", p, el.node)
            if k is NodeKind.BARGE and el.order is not None:
                pending_by_order[el.order].append(idx)
            pos_of[el.node] = idx
            exp_full = full + inst.full_delta[el.node]
            if st.full_load != exp_full:
                v("C26" if k is NodeKind.DESTINATION else "C25", abs(st.full_load - exp_full),
                  f"full load at {el.node} is {st.full_load}, expected {exp_full}", p, el.node)
            if k is NodeKind.BARGE:
                exp_empty = empty + 1
            elif k is NodeKind.E_DESTINATION:
                exp_empty = empty - st.dropped
            else:
                exp_empty = empty
            if st.empty_load != exp_empty:
                v("C27", abs(st.empty_load - exp_empty), f"empty load at {el.node} is {st.empty_load}, expected {exp_empty}", p, el.node)
            if idx == 0:
                implied_full = st.full_load - inst.full_delta[el.node]
                implied_empty = st.empty_load - (1 if k is NodeKind.BARGE else -st.dropped if k is NodeKind.E_DESTINATION else 0)
                if implied_full != 0:
                    v("C29", abs(implied_full), "tugboat leaves the start with full barges", p)
                if implied_empty != 0:
                    v("C30", abs(implied_empty), "tugboat leaves the start with empty barges", p)
            full, empty = st.full_load, st.empty_load
            dep = st.arrival + st.stay
            prev = el.node
        need = dep + t[prev][inst.sink]
        if schedule.finish[p] < need - tol:
            v("C22", need - schedule.finish[p], "return to the sink earlier than sailing allows", p)
        if stops:
            if stops[-1].full_load != 0:
                v("C31", abs(stops[-1].full_load), "route ends with full barges in tow", p)
            if stops[-1].empty_load != 0:
                v("C32", abs(stops[-1].empty_load), "route ends with empty barges in tow", p)


def is_feasible(inst: Instance, sol: Solution) -> bool:
    return not validate(inst, sol)
