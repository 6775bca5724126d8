"""Route encoding and solution pools."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .errors import MismatchedInstance, SchemaError
from .model import Instance, NodeKind


class RouteElement(NamedTuple):
    """One stop on a tugboat route.

    ``visit`` is 1 or 2 for typeE destinations (first/second call of the
    same tugboat) and always 1 otherwise.  ``order`` is the typeE order
    index for barge pickups and typeE destinations, ``None`` for typeF nodes.
    """

    node: int
    visit: int = 1
    order: int | None = None


Route = list[RouteElement]


@dataclass
class Solution:
    routes: list[Route]
    unassigned_f: list[int] = field(default_factory=list)
    unassigned_e: dict[int, int] = field(default_factory=dict)
    free_barges: list[int] = field(default_factory=list)

    @classmethod
    def empty(cls, inst: Instance) -> "Solution":
        """All orders pooled, every barge free, every route empty."""
        return cls(
            routes=[[] for _ in inst.tugboats],
            unassigned_f=list(range(len(inst.orders_f))),
            unassigned_e={j: o.required_barges for j, o in enumerate(inst.orders_e)},
            free_barges=list(inst.barge_nodes),
        )

    def copy(self) -> "Solution":
        return Solution(
            routes=[list(r) for r in self.routes],
            unassigned_f=list(self.unassigned_f),
            unassigned_e=dict(self.unassigned_e),
            free_barges=list(self.free_barges),
        )

    def encoding(self) -> tuple:
        return tuple(tuple(r) for r in self.routes)

    def printed(self) -> list[list[int]]:
        """Plain node lists, the form used when reporting routes."""
        return [[el.node for el in r] for r in self.routes]

    # -- pool helpers ----------------------------------------------------------
    def pool_f(self, k: int) -> None:
        if k not in self.unassigned_f:
            self.unassigned_f.append(k)
            self.unassigned_f.sort()

    def pool_e(self, j: int, count: int) -> None:
        if count <= 0:
            return
        self.unassigned_e[j] = self.unassigned_e.get(j, 0) + count

    def take_e(self, j: int, count: int) -> None:
        left = self.unassigned_e.get(j, 0) - count
        if left > 0:
            self.unassigned_e[j] = left
        else:
            self.unassigned_e.pop(j, None)

    def free(self, barge_node: int) -> None:
        self.free_barges.append(barge_node)
        self.free_barges.sort()

    def claim(self, barge_node: int) -> None:
        self.free_barges.remove(barge_node)

    def pending_e(self) -> list[tuple[int, int]]:
        return sorted((j, c) for j, c in self.unassigned_e.items() if c > 0)


def complete(sol: Solution) -> bool:
    """True iff no typeF order is pooled and no typeE order still needs barges."""
    return not sol.unassigned_f and not any(c > 0 for c in sol.unassigned_e.values())


def renumber_h_visits(inst: Instance, route: Route) -> Route:
    """Return ``route`` with typeE destination visits numbered by occurrence."""
    kinds = inst.kinds
    seen: dict[int, int] = {}
    changed = False
    out = list(route)
    for pos, el in enumerate(out):
        if kinds[el.node] is NodeKind.E_DESTINATION:
            c = seen.get(el.node, 0) + 1
            seen[el.node] = c
            if el.visit != c:
                out[pos] = el._replace(visit=c)
                changed = True
    return out if changed else route


def h_element(inst: Instance, j: int, visit: int = 1) -> RouteElement:
    return RouteElement(inst.orders_e[j].destination, visit, j)


def f_elements(inst: Instance, k: int) -> tuple[RouteElement, RouteElement]:
    o = inst.orders_f[k]
    return RouteElement(o.origin), RouteElement(o.destination)


# ---------------------------------------------------------------------------
# serialization


def solution_to_raw(inst: Instance, sol: Solution) -> dict[str, Any]:
    kinds = inst.kinds
    routes = []
    for r in sol.routes:
        enc = []
        for el in r:
            if kinds[el.node] is NodeKind.BARGE:
                enc.append([el.node, el.visit, el.order])
            else:
                enc.append([el.node, el.visit])
        routes.append(enc)
    return {
        "routes": routes,
        "unassigned_f": sorted(sol.unassigned_f),
        "unassigned_e": [[j, c] for j, c in sol.pending_e()],
        "free_barges": sorted(sol.free_barges),
    }


def solution_from_raw(inst: Instance, raw: dict[str, Any]) -> Solution:
    """Parse a solution document against ``inst``.

    Raises :class:`MismatchedInstance` when the document names nodes or
    orders the instance does not define.
    """
    if not isinstance(raw, dict) or "routes" not in raw:
        raise SchemaError("solution document needs a 'routes' field")
    n = inst.n_nodes
    kinds = inst.kinds
    if len(raw["routes"]) != inst.n_tugboats:
        raise MismatchedInstance(f"solution has {len(raw['routes'])} routes, instance has {inst.n_tugboats} tugboats")
    routes = []
    for r in raw["routes"]:
        route = []
        for item in r:
            if isinstance(item, int):
                item = [item, 1]
            node = int(item[0])
            if not 0 <= node < n:
                raise MismatchedInstance(f"node {node} is not defined by the instance")
            visit = int(item[1]) if len(item) > 1 else 1
            if kinds[node] is NodeKind.BARGE:
                order = item[2] if len(item) > 2 else None
                order = None if order is None else int(order)
            elif kinds[node] is NodeKind.E_DESTINATION:
                order = inst.e_order_of[node]
            else:
                order = None
            route.append(RouteElement(node, visit, order))
        routes.append(route)
    for k in raw.get("unassigned_f", []):
        if not 0 <= k < len(inst.orders_f):
            raise MismatchedInstance(f"typeF order {k} is not defined")
    for j, _ in raw.get("unassigned_e", []):
        if not 0 <= j < len(inst.orders_e):
            raise MismatchedInstance(f"typeE order {j} is not defined")
    for b in raw.get("free_barges", []):
        if not 0 <= b < n or kinds[b] is not NodeKind.BARGE:
            raise MismatchedInstance(f"node {b} is not an empty barge")
    return Solution(
        routes=routes,
        unassigned_f=sorted(int(k) for k in raw.get("unassigned_f", [])),
        unassigned_e={int(j): int(c) for j, c in raw.get("unassigned_e", []) if int(c) > 0},
        free_barges=sorted(int(b) for b in raw.get("free_barges", [])),
    )
