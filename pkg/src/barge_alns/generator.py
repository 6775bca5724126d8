"""Seeded instance generation.

Two port topologies are shipped with approximate real coordinates: a
coastal one (seven sea ports plus a virtual depot) and an inland river one
(six river ports plus a virtual depot).  Each preset row fixes the number of
typeF orders, typeE orders and the average number of empty barges per typeE
order.  Time windows open early and close late enough for greedy
construction to be penalty-free; the working-time limit of every tugboat is
set to a quarter of the summed per-order round-trip times.
"""

from __future__ import annotations

import math
import random
from typing import Any

from .errors import UnknownPreset
from .model import Instance, build_instance, great_circle_km

OCEANIC_PORTS = (
    ("Depot", 33.80, 121.20),
    ("Zhoushan", 29.94, 122.30),
    ("Shanghai", 31.33, 121.63),
    ("Yantai", 37.55, 121.40),
    ("Qingdao", 36.08, 120.32),
    ("Rizhao", 35.38, 119.56),
    ("Caofeidian", 38.93, 118.52),
    ("Tianjin", 38.98, 117.79),
)

INLAND_PORTS = (
    ("Depot", 31.95, 118.62),
    ("Nanjing", 32.08, 118.74),
    ("Maanshan", 31.70, 118.48),
    ("Wuhu", 31.35, 118.36),
    ("Tongling", 30.95, 117.78),
    ("Anqing", 30.50, 117.05),
    ("Jiujiang", 29.73, 116.00),
)

TOPOLOGIES = {"oceanic": OCEANIC_PORTS, "inland": INLAND_PORTS}

# (typeF orders, typeE orders, average empty barges per typeE order)
PRESETS = {
    "oceanic": {1: (13, 1, 8), 2: (8, 1, 10), 3: (5, 2, 12), 4: (15, 2, 11), 5: (20, 4, 5), 6: (30, 6, 6)},
    "inland": {1: (13, 1, 8), 2: (8, 1, 10), 3: (5, 2, 12), 4: (15, 2, 11), 5: (20, 4, 5), 6: (30, 4, 9)},
}

N_TUGBOATS = 3
CAPACITY = 5
SPEED = 20.0
HORIZON_SHARE = 0.25


def preset_shape(row: int, topology: str) -> tuple[int, int, int]:
    try:
        return PRESETS[topology][row]
    except KeyError:
        raise UnknownPreset(f"no preset row {row!r} for topology {topology!r}") from None


def generate_raw(row: int, topology: str = "oceanic", seed: int = 0) -> dict[str, Any]:
    n_f, n_e, avg_b = preset_shape(row, topology)
    ports = TOPOLOGIES[topology]
    rng = random.Random(f"{topology}:{row}:{seed}")
    real = range(1, len(ports))

    f_ports = []
    for _ in range(n_f):
        a, b = rng.sample(real, 2)
        f_ports.append((a, b))
    e_ports = [rng.choice(real) for _ in range(n_e)]
    n_b = n_e * avg_b
    b_ports = [rng.choice(real) for _ in range(n_b)]

    max_q = 2 * CAPACITY * 2
    qs = [min(max_q, rng.randint(max(1, avg_b - 3), avg_b)) for _ in range(n_e)]

    def t(a: int, b: int) -> float:
        return great_circle_km(ports[a][1:], ports[b][1:]) / SPEED

    horizon = 0.0
    for a, b in f_ports:
        horizon += t(0, a) + t(a, b) + t(b, 0)
    per_e = [0.0] * n_e
    for j, h in enumerate(e_ports):
        per_e[j] = math.ceil(qs[j] / CAPACITY) * 2 * t(0, h)
    for b in b_ports:
        # every barge fetched on its own worst-case detour through the farthest destination
        per = max((t(0, b) + t(b, h) + t(h, 0) for h in e_ports), default=0.0)
        horizon += per
    horizon += sum(per_e)
    # a quarter of the serial workload: tight enough to spread orders over
    # tugboats, loose enough for penalty-free greedy construction
    horizon = math.ceil(HORIZON_SHARE * horizon)
    early = 0.05 * horizon

    def window() -> list:
        return [round(rng.uniform(0.0, early), 3), float(horizon)]

    orders_f = [{"origin_window": window(), "destination_window": window()} for _ in f_ports]
    orders_e = [{"required_barges": q, "window": window()} for q in qs]
    barges = [{"idle_until": round(rng.uniform(0.0, early), 3), "window": [0.0, float(horizon)]} for _ in b_ports]

    node_ports = []
    for a, b in f_ports:
        node_ports += [a, b]
    node_ports += e_ports + b_ports + [0, 0]
    return {
        "name": f"{topology}-row{row}-seed{seed}",
        "tugboats": [
            {"id": f"tug{p + 1}", "max_working_time": float(horizon), "cost_per_time": 100.0, "cost_per_distance": 1.0}
            for p in range(N_TUGBOATS)
        ],
        "orders_f": orders_f,
        "orders_e": orders_e,
        "barges": barges,
        "network": {
            "coordinates": [[ports[i][1], ports[i][2]] for i in node_ports],
            "ports": [ports[i][0] for i in node_ports],
            "speed": SPEED,
        },
        "params": {"K": CAPACITY},
    }


def generate(row: int, topology: str = "oceanic", seed: int = 0) -> Instance:
    """Random instance with the shape of preset ``row`` on ``topology``."""
    if topology not in TOPOLOGIES:
        raise UnknownPreset(f"unknown topology {topology!r}")
    return build_instance(generate_raw(row, topology, seed))


# ---------------------------------------------------------------------------
# tiny instances for exhaustive checks

TINY_MIXES = ("f", "e", "fe", "coop")


def tiny_raw(seed: int, mix: str = "fe", windows: str = "loose") -> dict[str, Any]:
    """A desk-size instance on a random planar metric with distinct points.

    ``mix`` picks the order mix: ``f`` (typeF only), ``e`` (one typeE order),
    ``fe`` (both) and ``coop`` (a typeE order needing more barges than one
    tugboat can tow, so it must be split).  ``windows='tight'`` draws finite
    closing times so that some orderings are late.
    """
    rng = random.Random(f"tiny:{mix}:{windows}:{seed}")
    K = 5
    n_tugs = 2
    if mix == "f":
        n_f, qs, n_b = rng.choice((2, 3)), [], 0
    elif mix == "e":
        q = rng.randint(1, 3)
        n_f, qs, n_b = 0, [q], q + rng.randint(0, 1)
    elif mix == "fe":
        q = rng.randint(1, 2)
        n_f, qs, n_b = rng.randint(1, 2), [q], q + rng.randint(0, 1)
    elif mix == "coop":
        K = rng.choice((1, 2))
        q = K + 1
        n_f, qs, n_b = rng.randint(0, 1), [q], q + rng.randint(0, 1)
    else:
        raise UnknownPreset(f"unknown tiny mix {mix!r}")
    n = 2 * n_f + len(qs) + n_b + 2
    pts: set[tuple[int, int]] = set()
    while len(pts) < n - 1:
        pts.add((rng.randint(0, 60), rng.randint(0, 60)))
    pts_l = sorted(pts)
    rng.shuffle(pts_l)
    coords = pts_l + [pts_l[-1]]  # s and s' share the depot
    d = [[round(math.dist(a, b), 6) for b in coords] for a in coords]
    speed = 20.0
    t = [[round(x / speed, 6) for x in row] for row in d]

    def win() -> list:
        if windows == "tight":
            lo = round(rng.uniform(0, 2), 3)
            return [lo, round(lo + rng.uniform(2.0, 8.0), 3)]
        return [round(rng.uniform(0, 1), 3), None]

    return {
        "name": f"tiny-{mix}-{windows}-{seed}",
        "tugboats": [
            {"id": f"tug{p + 1}", "max_working_time": 100.0 if windows == "loose" else 14.0,
             "cost_per_time": 10.0, "cost_per_distance": 1.0}
            for p in range(n_tugs)
        ],
        "orders_f": [{"origin_window": win(), "destination_window": win()} for _ in range(n_f)],
        "orders_e": [{"required_barges": q, "window": win()} for q in qs],
        "barges": [{"idle_until": round(rng.uniform(0, 1.5), 3), "window": win()} for _ in range(n_b)],
        "network": {"time_matrix": t, "distance_matrix": d},
        "params": {"K": K},
    }


def tiny_instance(seed: int, mix: str = "fe", windows: str = "loose") -> Instance:
    return build_instance(tiny_raw(seed, mix, windows))
