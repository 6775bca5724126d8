"""Schedule decoding and the loss used throughout the search.

Times are decoded with the earliest-start rule: a tugboat leaves a node as
soon as the node is ready (window opening, and for empty barges also the
idle time) and sails straight to the next one.  Barges tagged for a typeE
order are dropped at the next visit of that order's destination on the same
route.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

from .errors import NegativeLoad
from .model import Instance, NodeKind, PenaltyConfig
from .solution import Route, Solution


class Stop(NamedTuple):
    arrival: float
    stay: float
    full_load: int
    empty_load: int
    dropped: int = 0


@dataclass
class Schedule:
    stops: list[list[Stop]]
    finish: list[float]
    start: list[float]

    def to_raw(self) -> dict:
        return {
            "start": list(self.start),
            "finish": list(self.finish),
            "stops": [[list(s) for s in route] for route in self.stops],
        }

    @classmethod
    def from_raw(cls, raw: dict) -> "Schedule":
        return cls(
            stops=[[Stop(float(s[0]), float(s[1]), int(s[2]), int(s[3]), int(s[4])) for s in r] for r in raw["stops"]],
            finish=[float(x) for x in raw["finish"]],
            start=[float(x) for x in raw.get("start", [0.0] * len(raw["finish"]))],
        )


@dataclass(frozen=True)
class LossBreakdown:
    time_cost: float = 0.0
    distance_cost: float = 0.0
    tw_penalty: float = 0.0
    hours_penalty: float = 0.0
    unserved_penalty: float = 0.0

    @property
    def total(self) -> float:
        return self.time_cost + self.distance_cost + self.tw_penalty + self.hours_penalty + self.unserved_penalty

    @property
    def routing_cost(self) -> float:
        return self.time_cost + self.distance_cost

    @property
    def penalties(self) -> float:
        return self.tw_penalty + self.hours_penalty + self.unserved_penalty

    def to_raw(self) -> dict:
        d = asdict(self)
        d["total"] = self.total
        return d


def propagate_route(inst: Instance, route: Route, strict: bool = True) -> tuple[list[Stop], float]:
    """Decode one route; returns per-element stops and the sink arrival time."""
    t = inst.t
    ready = inst.ready
    kinds = inst.kinds
    e_order_of = inst.e_order_of
    prev = inst.source
    clock = 0.0
    full = empty = 0
    pending: dict[int | None, int] = {}
    stops = []
    for el in route:
        node = el.node
        arr = clock + t[prev][node]
        r = ready[node]
        stay = r - arr if r > arr else 0.0
        kind = kinds[node]
        dropped = 0
        if kind is NodeKind.ORIGIN:
            full += 1
        elif kind is NodeKind.DESTINATION:
            full -= 1
            if strict and full < 0:
                raise NegativeLoad(f"node {node}: delivers a full barge that was never picked up")
        elif kind is NodeKind.BARGE:
            empty += 1
            pending[el.order] = pending.get(el.order, 0) + 1
        elif kind is NodeKind.E_DESTINATION:
            dropped = pending.pop(e_order_of[node], 0)
            empty -= dropped
        stops.append(Stop(arr, stay, full, empty, dropped))
        clock = arr + stay
        prev = node
    return stops, clock + t[prev][inst.sink]


def propagate(inst: Instance, sol: Solution, strict: bool = True) -> Schedule:
    """Earliest-start schedule for every route of ``sol``."""
    stops, finish = [], []
    for route in sol.routes:
        s, f = propagate_route(inst, route, strict)
        stops.append(s)
        finish.append(f)
    return Schedule(stops=stops, finish=finish, start=[0.0] * len(sol.routes))


def route_parts(inst: Instance, p: int, route: Route) -> tuple[float, float, float, float]:
    """(time cost, distance cost, summed lateness in hours, working-hour overrun) of one route."""
    tug = inst.tugboats[p]
    t, d, latest = inst.t, inst.d, inst.latest
    stops, finish = propagate_route(inst, route, strict=False)
    tt = dd = late = 0.0
    prev = inst.source
    for el, st in zip(route, stops):
        tt += t[prev][el.node]
        dd += d[prev][el.node]
        if st.arrival > latest[el.node]:
            late += st.arrival - latest[el.node]
        prev = el.node
    tt += t[prev][inst.sink]
    dd += d[prev][inst.sink]
    over = max(0.0, finish - tug.max_working_time)
    return tug.cost_per_time * tt, tug.cost_per_distance * dd, late, over


def route_loss(inst: Instance, p: int, route: Route, penalties: PenaltyConfig | None = None) -> float:
    """Loss restricted to one route (routing cost plus its time penalties)."""
    pen = penalties or inst.penalties
    ct, cd, late, over = route_parts(inst, p, route)
    return ct + cd + pen.time_window * late + pen.working_hours * over


def unserved_units(sol: Solution) -> int:
    """Pooled order count plus the barge deficit of pooled typeE orders."""
    pending = [c for c in sol.unassigned_e.values() if c > 0]
    return len(sol.unassigned_f) + len(pending) + sum(pending)


def loss(inst: Instance, sol: Solution, penalties: PenaltyConfig | None = None) -> LossBreakdown:
    pen = penalties or inst.penalties
    ct = cd = late = over = 0.0
    for p, route in enumerate(sol.routes):
        a, b, c, d = route_parts(inst, p, route)
        ct += a
        cd += b
        late += c
        over += d
    return LossBreakdown(
        time_cost=ct,
        distance_cost=cd,
        tw_penalty=pen.time_window * late,
        hours_penalty=pen.working_hours * over,
        unserved_penalty=pen.unserved * unserved_units(sol),
    )
