"""Problem data for multi-trip drop-and-pull tugboat scheduling.

Logical node numbering is fixed by the order lists in the instance
document: typeF order ``k`` owns node ``2k`` (origin) and ``2k + 1``
(destination), typeE destinations follow in order, then the empty barges,
and finally the virtual start ``s`` and virtual sink ``s'``.  Routes never
store ``s``/``s'``; they are implicit at both ends.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .errors import InconsistentError, SchemaError

INF = math.inf
EARTH_RADIUS_KM = 6371.0
DEFAULT_SPEED = 20.0
DEFAULT_CAPACITY = 5
DEFAULT_MAX_WORKING_TIME = 14.0

Window = tuple[float, float]


class NodeKind(enum.Enum):
    SOURCE = "s"
    SINK = "s'"
    ORIGIN = "S"
    DESTINATION = "W"
    E_DESTINATION = "H"
    BARGE = "B"


@dataclass(frozen=True)
class Tugboat:
    id: str
    max_working_time: float = DEFAULT_MAX_WORKING_TIME
    cost_per_time: float = 100.0
    cost_per_distance: float = 1.0


@dataclass(frozen=True)
class TypeFOrder:
    origin: int
    destination: int
    origin_window: Window = (0.0, INF)
    destination_window: Window = (0.0, INF)


@dataclass(frozen=True)
class TypeEOrder:
    destination: int
    required_barges: int
    window: Window = (0.0, INF)


@dataclass(frozen=True)
class EmptyBarge:
    node: int
    idle_until: float = 0.0
    window: Window = (0.0, INF)


@dataclass(frozen=True)
class PenaltyConfig:
    """Weights of the soft terms added to the routing cost."""

    time_window: float = 1e4
    working_hours: float = 1e4
    unserved: float = 1e5


@dataclass(frozen=True, eq=False)
class Network:
    kinds: tuple[NodeKind, ...]
    travel_time: np.ndarray
    distance: np.ndarray
    capacity: int = DEFAULT_CAPACITY
    coordinates: tuple[tuple[float, float], ...] | None = None
    speed: float | None = None
    ports: tuple[str, ...] | None = None
    from_coordinates: bool = False

    @property
    def size(self) -> int:
        return len(self.kinds)


@dataclass(frozen=True, eq=False)
class Instance:
    tugboats: tuple[Tugboat, ...]
    orders_f: tuple[TypeFOrder, ...]
    orders_e: tuple[TypeEOrder, ...]
    barges: tuple[EmptyBarge, ...]
    network: Network
    penalties: PenaltyConfig = field(default_factory=PenaltyConfig)
    name: str = ""

    # -- sizes and special nodes -------------------------------------------
    @property
    def n_nodes(self) -> int:
        return self.network.size

    @property
    def source(self) -> int:
        return self.n_nodes - 2

    @property
    def sink(self) -> int:
        return self.n_nodes - 1

    @property
    def capacity(self) -> int:
        return self.network.capacity

    @property
    def n_tugboats(self) -> int:
        return len(self.tugboats)

    @property
    def kinds(self) -> tuple[NodeKind, ...]:
        return self.network.kinds

    def kind(self, node: int) -> NodeKind:
        return self.network.kinds[node]

    # -- hot-loop lookup tables (plain lists are much faster than numpy
    #    scalar indexing inside Python loops) ------------------------------
    @cached_property
    def t(self) -> list[list[float]]:
        return self.network.travel_time.tolist()

    @cached_property
    def d(self) -> list[list[float]]:
        return self.network.distance.tolist()

    @cached_property
    def arc_cost(self) -> list[list[list[float]]]:
        """Per tugboat, ``C^T t_ij + C^D d_ij`` as nested lists."""
        out = []
        for tug in self.tugboats:
            m = tug.cost_per_time * self.network.travel_time + tug.cost_per_distance * self.network.distance
            out.append(m.tolist())
        return out

    @cached_property
    def earliest(self) -> list[float]:
        e = [0.0] * self.n_nodes
        for o in self.orders_f:
            e[o.origin] = o.origin_window[0]
            e[o.destination] = o.destination_window[0]
        for o in self.orders_e:
            e[o.destination] = o.window[0]
        for b in self.barges:
            e[b.node] = b.window[0]
        return e

    @cached_property
    def latest(self) -> list[float]:
        lat = [INF] * self.n_nodes
        for o in self.orders_f:
            lat[o.origin] = o.origin_window[1]
            lat[o.destination] = o.destination_window[1]
        for o in self.orders_e:
            lat[o.destination] = o.window[1]
        for b in self.barges:
            lat[b.node] = b.window[1]
        return lat

    @cached_property
    def ready(self) -> list[float]:
        """Earliest service start per node; barges also wait for their idle time."""
        r = list(self.earliest)
        for b in self.barges:
            r[b.node] = max(b.window[0], b.idle_until)
        return r

    @cached_property
    def idle_until(self) -> list[float]:
        v = [0.0] * self.n_nodes
        for b in self.barges:
            v[b.node] = b.idle_until
        return v

    @cached_property
    def f_order_of(self) -> dict[int, int]:
        """Maps origin and destination nodes to their typeF order index."""
        m = {}
        for k, o in enumerate(self.orders_f):
            m[o.origin] = k
            m[o.destination] = k
        return m

    @cached_property
    def e_order_of(self) -> dict[int, int]:
        return {o.destination: j for j, o in enumerate(self.orders_e)}

    @cached_property
    def barge_nodes(self) -> tuple[int, ...]:
        return tuple(b.node for b in self.barges)

    @cached_property
    def full_delta(self) -> list[int]:
        """Change of towed full barges when leaving each node."""
        v = [0] * self.n_nodes
        for o in self.orders_f:
            v[o.origin] = 1
            v[o.destination] = -1
        return v

    def non_virtual_count(self) -> int:
        return self.n_nodes - 2

    def to_raw(self) -> dict[str, Any]:
        return instance_to_raw(self)


# ---------------------------------------------------------------------------
# construction from raw documents


def _window(raw: Any, where: str) -> Window:
    if raw is None:
        return (0.0, INF)
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise SchemaError(f"{where}: window must be a [E, L] pair")
    lo = 0.0 if raw[0] is None else float(raw[0])
    hi = INF if raw[1] is None else float(raw[1])
    if lo > hi:
        raise InconsistentError(f"{where}: window has E > L ({lo} > {hi})")
    return (lo, hi)


def _require(d: dict, key: str, where: str) -> Any:
    if key not in d:
        raise SchemaError(f"{where}: missing field {key!r}")
    return d[key]


def great_circle_km(a: Sequence[float], b: Sequence[float]) -> float:
    """Haversine distance between two (lat, lon) points in degrees."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def distance_matrix(coords: Sequence[Sequence[float]]) -> np.ndarray:
    n = len(coords)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = great_circle_km(coords[i], coords[j])
    return m


def _matrix(raw: Any, n: int, name: str) -> np.ndarray:
    try:
        m = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"network.{name}: not a numeric matrix") from exc
    if m.shape != (n, n):
        raise SchemaError(f"network.{name}: expected shape {(n, n)}, got {m.shape}")
    if np.any(m < 0) or not np.all(np.isfinite(m)):
        raise InconsistentError(f"network.{name}: entries must be finite and non-negative")
    if np.any(np.diag(m) != 0):
        raise InconsistentError(f"network.{name}: diagonal must be zero")
    return m


def node_kinds(n_f: int, n_e: int, n_b: int) -> tuple[NodeKind, ...]:
    kinds: list[NodeKind] = []
    for _ in range(n_f):
        kinds += [NodeKind.ORIGIN, NodeKind.DESTINATION]
    kinds += [NodeKind.E_DESTINATION] * n_e
    kinds += [NodeKind.BARGE] * n_b
    kinds += [NodeKind.SOURCE, NodeKind.SINK]
    return tuple(kinds)


def build_instance(raw: dict[str, Any]) -> Instance:
    """Validate an instance document and build the immutable :class:`Instance`.

    Raises :class:`SchemaError` for missing or malformed fields and
    :class:`InconsistentError` for well-formed but impossible data (e.g. a
    typeE order asking for more barges than exist, or a window with E > L).
    """
    if not isinstance(raw, dict):
        raise SchemaError("instance document must be a mapping")
    tug_raw = _require(raw, "tugboats", "instance")
    f_raw = _require(raw, "orders_f", "instance")
    e_raw = _require(raw, "orders_e", "instance")
    b_raw = _require(raw, "barges", "instance")
    net_raw = _require(raw, "network", "instance")
    params = raw.get("params", {}) or {}

    capacity = int(params.get("K", DEFAULT_CAPACITY))
    if capacity < 1:
        raise InconsistentError("params.K must be >= 1")
    pen_raw = params.get("penalties", {}) or {}
    penalties = PenaltyConfig(**{k: float(v) for k, v in pen_raw.items()})

    if not tug_raw:
        raise SchemaError("instance: at least one tugboat is required")
    tugboats = []
    for i, t in enumerate(tug_raw):
        where = f"tugboats[{i}]"
        tug = Tugboat(
            id=str(t.get("id", f"p{i}")),
            max_working_time=float(t.get("max_working_time", DEFAULT_MAX_WORKING_TIME)),
            cost_per_time=float(t.get("cost_per_time", 100.0)),
            cost_per_distance=float(t.get("cost_per_distance", 1.0)),
        )
        if tug.max_working_time <= 0:
            raise InconsistentError(f"{where}: max_working_time must be > 0")
        if tug.cost_per_time < 0 or tug.cost_per_distance < 0:
            raise InconsistentError(f"{where}: cost rates must be >= 0")
        tugboats.append(tug)

    n_f, n_e, n_b = len(f_raw), len(e_raw), len(b_raw)
    kinds = node_kinds(n_f, n_e, n_b)
    n = len(kinds)

    orders_f = []
    for k, o in enumerate(f_raw):
        where = f"orders_f[{k}]"
        orders_f.append(
            TypeFOrder(
                origin=2 * k,
                destination=2 * k + 1,
                origin_window=_window(o.get("origin_window"), where + ".origin_window"),
                destination_window=_window(o.get("destination_window"), where + ".destination_window"),
            )
        )

    max_q = 2 * capacity * min(2, len(tugboats))
    orders_e = []
    for j, o in enumerate(e_raw):
        where = f"orders_e[{j}]"
        q = _require(o, "required_barges", where)
        if not isinstance(q, int) or isinstance(q, bool):
            raise SchemaError(f"{where}: required_barges must be an integer")
        if q < 1:
            raise InconsistentError(f"{where}: required_barges must be >= 1")
        if q > max_q:
            raise InconsistentError(f"{where}: required_barges={q} exceeds {max_q} (two tugboats, two visits each)")
        orders_e.append(TypeEOrder(destination=2 * n_f + j, required_barges=q, window=_window(o.get("window"), where + ".window")))

    barges = []
    for i, b in enumerate(b_raw):
        where = f"barges[{i}]"
        idle = float(b.get("idle_until", 0.0))
        if idle < 0:
            raise InconsistentError(f"{where}: idle_until must be >= 0")
        barges.append(EmptyBarge(node=2 * n_f + n_e + i, idle_until=idle, window=_window(b.get("window"), where + ".window")))

    demand = sum(o.required_barges for o in orders_e)
    if demand > n_b:
        raise InconsistentError(f"typeE orders require {demand} barges but only {n_b} are listed")

    network = _build_network(net_raw, kinds, capacity)
    return Instance(
        tugboats=tuple(tugboats),
        orders_f=tuple(orders_f),
        orders_e=tuple(orders_e),
        barges=tuple(barges),
        network=network,
        penalties=penalties,
        name=str(raw.get("name", "")),
    )


def _build_network(net: dict[str, Any], kinds: tuple[NodeKind, ...], capacity: int) -> Network:
    n = len(kinds)
    if not isinstance(net, dict):
        raise SchemaError("network must be a mapping")
    coords = net.get("coordinates")
    ports = net.get("ports")
    speed = net.get("speed")
    coord_tuple = None
    if coords is not None:
        if len(coords) != n:
            raise SchemaError(f"network.coordinates: expected {n} points, got {len(coords)}")
        coord_tuple = tuple((float(c[0]), float(c[1])) for c in coords)
    if ports is not None and len(ports) != n:
        raise SchemaError(f"network.ports: expected {n} labels, got {len(ports)}")

    if "time_matrix" in net or "distance_matrix" in net:
        t = _matrix(_require(net, "time_matrix", "network"), n, "time_matrix")
        d = _matrix(_require(net, "distance_matrix", "network"), n, "distance_matrix")
        from_coords = False
    elif coord_tuple is not None:
        speed = DEFAULT_SPEED if speed is None else float(speed)
        if speed <= 0:
            raise InconsistentError("network.speed must be > 0")
        d = distance_matrix(coord_tuple)
        t = d / speed
        from_coords = True
    else:
        raise SchemaError("network: need either coordinates or time_matrix + distance_matrix")
    t.setflags(write=False)
    d.setflags(write=False)
    return Network(
        kinds=kinds,
        travel_time=t,
        distance=d,
        capacity=capacity,
        coordinates=coord_tuple,
        speed=None if speed is None else float(speed),
        ports=None if ports is None else tuple(str(p) for p in ports),
        from_coordinates=from_coords,
    )


# ---------------------------------------------------------------------------
# serialization


def _w(win: Window) -> list:
    return [win[0], None if math.isinf(win[1]) else win[1]]


def instance_to_raw(inst: Instance) -> dict[str, Any]:
    net = inst.network
    net_raw: dict[str, Any] = {}
    if net.coordinates is not None:
        net_raw["coordinates"] = [list(c) for c in net.coordinates]
    if net.ports is not None:
        net_raw["ports"] = list(net.ports)
    if net.from_coordinates:
        net_raw["speed"] = net.speed
    else:
        net_raw["time_matrix"] = net.travel_time.tolist()
        net_raw["distance_matrix"] = net.distance.tolist()
    return {
        "name": inst.name,
        "tugboats": [
            {
                "id": t.id,
                "max_working_time": t.max_working_time,
                "cost_per_time": t.cost_per_time,
                "cost_per_distance": t.cost_per_distance,
            }
            for t in inst.tugboats
        ],
        "orders_f": [{"origin_window": _w(o.origin_window), "destination_window": _w(o.destination_window)} for o in inst.orders_f],
        "orders_e": [{"required_barges": o.required_barges, "window": _w(o.window)} for o in inst.orders_e],
        "barges": [{"idle_until": b.idle_until, "window": _w(b.window)} for b in inst.barges],
        "network": net_raw,
        "params": {
            "K": inst.capacity,
            "penalties": {
                "time_window": inst.penalties.time_window,
                "working_hours": inst.penalties.working_hours,
                "unserved": inst.penalties.unserved,
            },
        },
    }


def dumps_canonical(doc: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    return build_instance(raw)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(inst.to_raw()))
