"""Static route maps (SVG, GeoJSON) and the benchmark table.

Coordinates are stored as ``[lat, lon]`` in instance documents; GeoJSON
positions are written as ``[lon, lat]``.  Instances given only by matrices
get a deterministic circular layout so that every solution can be drawn.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import MismatchedInstance
from .model import Instance
from .solution import Solution

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _check(inst: Instance, sol: Solution) -> None:
    if len(sol.routes) != inst.n_tugboats:
        raise MismatchedInstance(f"solution has {len(sol.routes)} routes, instance has {inst.n_tugboats} tugboats")
    n = inst.n_nodes
    for r in sol.routes:
        for el in r:
            if not 0 <= el.node < n:
                raise MismatchedInstance(f"node {el.node} is not defined by the instance")


def node_positions(inst: Instance) -> list[tuple[float, float]]:
    """(lon, lat) per logical node; a unit circle when no coordinates exist."""
    coords = inst.network.coordinates
    if coords is not None:
        return [(float(c[1]), float(c[0])) for c in coords]
    n = inst.n_nodes
    pos = []
    for i in range(n - 1):
        a = 2 * math.pi * i / max(1, n - 1)
        pos.append((round(math.cos(a), 9), round(math.sin(a), 9)))
    pos.append(pos[inst.source])
    return pos


def _places(inst: Instance, pos) -> list[tuple[tuple[float, float], str, list[int]]]:
    """Physical locations with a label and the logical nodes they carry."""
    names = inst.network.ports
    seen: dict[tuple[float, float], int] = {}
    out = []
    for i, xy in enumerate(pos):
        if xy not in seen:
            label = names[i] if names is not None else ("depot" if i >= inst.source else f"node {i}")
            seen[xy] = len(out)
            out.append((xy, label, []))
        out[seen[xy]][2].append(i)
    return out


def _route_points(inst: Instance, route, pos) -> list[tuple[float, float]]:
    return [pos[inst.source]] + [pos[el.node] for el in route] + [pos[inst.sink]]


def route_geojson(inst: Instance, sol: Solution) -> dict:
    """FeatureCollection: one Point per location, one LineString per non-empty route."""
    _check(inst, sol)
    pos = node_positions(inst)
    features = []
    for xy, label, nodes in _places(inst, pos):
        features.append({"type": "Feature", "geometry": {"type": "Point", "coordinates": [xy[0], xy[1]]},
                         "properties": {"name": label, "nodes": nodes}})
    for p, route in enumerate(sol.routes):
        if not route:
            continue
        line = [[x, y] for x, y in _route_points(inst, route, pos)]
        features.append({"type": "Feature", "geometry": {"type": "LineString", "coordinates": line},
                         "properties": {"tugboat": inst.tugboats[p].id, "index": p,
                                        "color": PALETTE[p % len(PALETTE)], "nodes": [el.node for el in route]}})
    return {"type": "FeatureCollection", "features": features}


def route_svg(inst: Instance, sol: Solution, width: int = 800, height: int = 600, margin: int = 40) -> str:
    """Route map as a standalone SVG document."""
    _check(inst, sol)
    pos = node_positions(inst)
    xs = [x for x, _ in pos]
    ys = [y for _, y in pos]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    scale = min(width, height) - 2 * margin

    def px(xy):
        x, y = xy
        return round(margin + (x - x0) / span * scale, 2), round(height - margin - (y - y0) / span * scale, 2)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    for p, route in enumerate(sol.routes):
        if not route:
            continue
        pts = " ".join(f"{a},{b}" for a, b in map(px, _route_points(inst, route, pos)))
        color = PALETTE[p % len(PALETTE)]
        out.append(f'<polyline class="route" data-tugboat="{escape(inst.tugboats[p].id)}" points="{pts}" '
                   f'fill="none" stroke="{color}" stroke-width="2" stroke-opacity="0.8"/>')
    for xy, label, _ in _places(inst, pos):
        a, b = px(xy)
        out.append(f'<circle class="port" cx="{a}" cy="{b}" r="4" fill="black"/>')
        out.append(f'<text x="{a + 6}" y="{b - 6}" font-size="11" font-family="sans-serif">{escape(label)}</text>')
    for p, tug in enumerate(inst.tugboats):
        y = margin + 16 * p
        color = PALETTE[p % len(PALETTE)]
        out.append(f'<line x1="{width - 130}" y1="{y}" x2="{width - 110}" y2="{y}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{width - 104}" y="{y + 4}" font-size="11" font-family="sans-serif">{escape(tug.id)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# benchmark table


def improvement_pct(initial: float, final: float, best_known: float | None = None) -> float:
    """Share of the construction loss removed by the search, in percent.

    With ``best_known`` it is the share of the gap to that value that was
    closed (100 means the best-known value was reached).
    """
    if best_known is not None:
        gap = initial - best_known
        return 100.0 if gap <= 0 else 100.0 * (initial - final) / gap
    if initial <= 0:
        return 0.0
    return 100.0 * (initial - final) / initial


@dataclass(frozen=True)
class BenchmarkRow:
    topology: str
    row: int
    trial: int
    seed: int
    construction_time: float
    search_time: float
    initial_loss: float
    final_loss: float
    iterations: int
    improvement: float


TABLE_FIELDS = ("topology", "row", "trial", "seed", "construction_time", "search_time", "initial_loss", "final_loss",
                "iterations", "improvement")


def summary(rows: list[BenchmarkRow]) -> dict[str, float]:
    finals = [r.final_loss for r in rows]
    return {"best": min(finals), "worst": max(finals), "mean": statistics.fmean(finals)}


def benchmark_csv(rows: list[BenchmarkRow]) -> str:
    """Per-trial rows followed by best/worst/mean summary rows per preset."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_FIELDS)
    groups: dict[tuple[str, int], list[BenchmarkRow]] = {}
    for r in rows:
        groups.setdefault((r.topology, r.row), []).append(r)
    for (topo, row), rs in groups.items():
        for r in rs:
            w.writerow([r.topology, r.row, r.trial, r.seed, f"{r.construction_time:.3f}", f"{r.search_time:.3f}",
                        f"{r.initial_loss:.2f}", f"{r.final_loss:.2f}", r.iterations, f"{r.improvement:.2f}"])
        for k, val in summary(rs).items():
            w.writerow([topo, row, k, "", "", "", "", f"{val:.2f}", "", ""])
    return buf.getvalue()
