"""Export the routing model as a CPLEX-LP file for an external MIP solver.

The model works on a per-tugboat graph.  Every typeE destination ``h`` is
split into two visit copies, named ``{h}v1`` and ``{h}v2`` in variable
names, so each tugboat may call at most twice.  Empty barges carry a
per-order load ``u`` that is emptied at the next call of that order's
destination, which is exactly the trip rule of the evaluator.  Call
ordering (``r``) removes zero-time subtours between co-located nodes.

Big-M constants are per family: times use ``big_m``, loads use ``K + 1``
and orderings use the node count.  Output is byte-stable for a given
instance and config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import TooLarge
from .model import Instance, NodeKind

DEFAULT_MAX_VARIABLES = 1_000_000


@dataclass(frozen=True)
class MipConfig:
    big_m: float | None = None
    linearize_c10: bool = True
    time_horizon: float | None = None
    max_variables: int = DEFAULT_MAX_VARIABLES

    def __post_init__(self):
        if not self.linearize_c10:
            raise ValueError("the drop-count product is always linearised")
        if self.time_horizon is not None and self.big_m is not None and self.big_m < self.time_horizon:
            raise ValueError("big_m must be >= time_horizon")


def _num(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def _horizon(inst: Instance) -> float:
    tmax = max((tug.max_working_time for tug in inst.tugboats), default=0.0)
    if math.isfinite(tmax):
        return float(tmax)
    # no working-time limit: any schedule without pointless waiting fits here
    ready = [r for r in inst.ready if math.isfinite(r)]
    lat = [x for x in inst.latest if math.isfinite(x)]
    tm = max((max(row) for row in inst.t), default=0.0)
    return float(max(ready + lat + [0.0]) + inst.n_nodes * tm)


class _Lp:
    def __init__(self):
        self.rows: list[str] = []
        self.bounds: list[str] = []
        self.binaries: list[str] = []
        self.generals: list[str] = []

    @staticmethod
    def expr(terms) -> str:
        parts = []
        for coef, var in terms:
            if coef == 0:
                continue
            sign = "-" if coef < 0 else "+"
            c = abs(coef)
            parts.append(f"{sign} {var}" if c == 1 else f"{sign} {_num(c)} {var}")
        if not parts:
            return "0 dummy0"
        lines, cur = [], []
        for p in parts:
            cur.append(p)
            if len(cur) == 8:
                lines.append(" ".join(cur))
                cur = []
        if cur:
            lines.append(" ".join(cur))
        return "\n   ".join(lines)

    def row(self, name: str, terms, sense: str, rhs: float) -> None:
        self.rows.append(f" {name}: {self.expr(terms)} {sense} {_num(rhs)}")


def _node_name(node) -> str:
    if isinstance(node, tuple):
        return f"{node[0]}v{node[1]}"
    return str(node)


def export_lp(inst: Instance, cfg: MipConfig = MipConfig()) -> str:
    """The complete model of ``inst`` as LP text."""
    kinds = inst.kinds
    K = inst.capacity
    s, s_end = inst.source, inst.sink
    t, dist = inst.t, inst.d
    ready, latest = inst.ready, inst.latest
    n_e = len(inst.orders_e)
    h_of = [o.destination for o in inst.orders_e]
    horizon = cfg.time_horizon if cfg.time_horizon is not None else _horizon(inst)
    tmax_arc = max((max(row) for row in t), default=0.0)
    M = cfg.big_m if cfg.big_m is not None else horizon + tmax_arc
    ML = K + 1

    plain = [i for i in range(inst.n_nodes - 2) if kinds[i] is not NodeKind.E_DESTINATION]
    copies = [(h, v) for h in h_of for v in (1, 2)]
    inner = plain + copies
    V = [s] + inner + [s_end]
    n_ord = len(V)

    def base(node):
        return node[0] if isinstance(node, tuple) else node

    def kind(node):
        return kinds[base(node)]

    def arc_ok(a, b):
        if a == b or a == s_end or b == s:
            return False
        if a == s and b == s_end:
            return True
        if a == s and kind(b) in (NodeKind.DESTINATION, NodeKind.E_DESTINATION):
            return False
        if b == s_end and kind(a) in (NodeKind.ORIGIN, NodeKind.BARGE):
            return False
        if isinstance(a, tuple) and isinstance(b, tuple) and a[0] == b[0]:
            return False
        return True

    arcs = [(a, b) for a in V for b in V if arc_ok(a, b)]
    barges = [b for b in plain if kinds[b] is NodeKind.BARGE]
    P = range(inst.n_tugboats)
    into_barge = [(a, b) for a, b in arcs if b in barges and not isinstance(b, tuple)]

    n_vars = len(P) * (len(arcs) + len(into_barge) * 2 * n_e + len(V) * (5 + n_e) + 3 * 2 * n_e)
    if n_vars > cfg.max_variables:
        raise TooLarge(f"{n_vars} variables exceed the cap of {cfg.max_variables}")

    def X(a, b, p):
        return f"x_{_node_name(a)}_{_node_name(b)}_{p}"

    def XH(a, b, p, j, v):
        return f"xh_{_node_name(a)}_{b}_{p}_{j}_{v}"

    def Vis(a, p):
        return f"v_{_node_name(a)}_{p}"

    def Z(a, p):
        return f"z_{_node_name(a)}_{p}"

    def S(a, p):
        return f"s_{_node_name(a)}_{p}"

    def YF(a, p):
        return f"yf_{_node_name(a)}_{p}"

    def U(j, a, p):
        return f"u_{j}_{_node_name(a)}_{p}"

    def R(a, p):
        return f"r_{_node_name(a)}_{p}"

    def E(j, v, p):
        return f"e_{j}_{v}_{p}"

    def W(j, v, p):
        return f"w_{j}_{v}_{p}"

    out_arcs = {a: [b for (x, b) in arcs if x == a] for a in V}
    in_arcs = {b: [a for (a, y) in arcs if y == b] for b in V}
    lp = _Lp()
    objective = []

    for p in P:
        tug = inst.tugboats[p]
        for a, b in arcs:
            ba, bb = base(a), base(b)
            c = tug.cost_per_time * t[ba][bb] + tug.cost_per_distance * dist[ba][bb]
            objective.append((c, X(a, b, p)))
            lp.binaries.append(X(a, b, p))
        for a, b in into_barge:
            for j in range(n_e):
                for v in (1, 2):
                    lp.binaries.append(XH(a, b, p, j, v))

        # route structure
        lp.row(f"leave_start_{p}", [(1, X(s, b, p)) for b in out_arcs[s]], "=", 1)
        lp.row(f"reach_sink_{p}", [(1, X(a, s_end, p)) for a in in_arcs[s_end]], "=", 1)
        for a in inner:
            lp.row(f"visit_{_node_name(a)}_{p}", [(1, Vis(a, p))] + [(-1, X(i, a, p)) for i in in_arcs[a]], "=", 0)
            lp.row(f"flow_{_node_name(a)}_{p}", [(1, X(i, a, p)) for i in in_arcs[a]]
                   + [(-1, X(a, k, p)) for k in out_arcs[a]], "=", 0)
            lp.binaries.append(Vis(a, p))

        # call order (subtour elimination)
        lp.row(f"order_start_{p}", [(1, R(s, p))], "=", 0)
        for a, b in arcs:
            lp.row(f"order_{_node_name(a)}_{_node_name(b)}_{p}", [(1, R(b, p)), (-1, R(a, p)), (-n_ord, X(a, b, p))],
                   ">=", 1 - n_ord)
        for a in V:
            lp.bounds.append(f" 0 <= {R(a, p)} <= {n_ord}")

        # typeF pickup before delivery on the same tugboat
        for k, o in enumerate(inst.orders_f):
            lp.row(f"pair_{k}_{p}", [(1, Vis(o.origin, p)), (-1, Vis(o.destination, p))], "=", 0)
            lp.row(f"precede_{k}_{p}", [(1, R(o.destination, p)), (-1, R(o.origin, p)), (-n_ord, Vis(o.origin, p))],
                   ">=", 1 - n_ord)

        # barge labels
        for b in barges:
            for a in in_arcs[b]:
                lp.row(f"label_{_node_name(a)}_{b}_{p}", [(1, XH(a, b, p, j, v)) for j in range(n_e) for v in (1, 2)]
                       + [(-1, X(a, b, p))], "=", 0)

        # typeE calls
        for j, h in enumerate(h_of):
            for v in (1, 2):
                hv = (h, v)
                labels = [(1, XH(a, b, p, j, v)) for b in barges for a in in_arcs[b]]
                lp.row(f"drops_{j}_{v}_{p}", labels + [(-1, W(j, v, p))], "=", 0)
                lp.row(f"w_x_{j}_{v}_{p}", [(1, W(j, v, p)), (-K, Vis(hv, p))], "<=", 0)
                lp.row(f"w_e_{j}_{v}_{p}", [(1, W(j, v, p)), (-1, E(j, v, p))], "<=", 0)
                lp.row(f"w_lo_{j}_{v}_{p}", [(1, W(j, v, p)), (-1, E(j, v, p)), (-K, Vis(hv, p))], ">=", -K)
                lp.row(f"e_on_{j}_{v}_{p}", [(1, E(j, v, p)), (-K, Vis(hv, p))], "<=", 0)
                lp.row(f"e_min_{j}_{v}_{p}", [(1, E(j, v, p)), (-1, Vis(hv, p))], ">=", 0)
                lp.bounds.append(f" 0 <= {E(j, v, p)} <= {K}")
                lp.bounds.append(f" 0 <= {W(j, v, p)} <= {K}")
                lp.generals.append(E(j, v, p))
            lp.row(f"second_call_{j}_{p}", [(1, Vis((h, 2), p)), (-1, Vis((h, 1), p))], "<=", 0)
            lp.row(f"call_order_{j}_{p}", [(1, R((h, 2), p)), (-1, R((h, 1), p)), (-n_ord, Vis((h, 2), p))],
                   ">=", 1 - n_ord)

        # times
        lp.row(f"start_time_{p}", [(1, Z(s, p))], "=", 0)
        lp.row(f"start_stay_{p}", [(1, S(s, p))], "=", 0)
        for a, b in arcs:
            ta = t[base(a)][base(b)]
            lp.row(f"time_{_node_name(a)}_{_node_name(b)}_{p}",
                   [(1, Z(b, p)), (-1, Z(a, p)), (-1, S(a, p)), (-M, X(a, b, p))], ">=", ta - M)
        for a in inner:
            r = ready[base(a)]
            if r > 0:
                lp.row(f"ready_{_node_name(a)}_{p}", [(1, Z(a, p)), (1, S(a, p)), (-r, Vis(a, p))], ">=", 0)
            L = latest[base(a)]
            if math.isfinite(L):
                lp.row(f"latest_{_node_name(a)}_{p}", [(1, Z(a, p)), (M, Vis(a, p))], "<=", L + M)
        lp.row(f"hours_{p}", [(1, Z(s_end, p)), (-1, Z(s, p))], "<=", min(tug.max_working_time, M))
        for a in V:
            lp.bounds.append(f" 0 <= {Z(a, p)} <= {_num(M)}")
            lp.bounds.append(f" 0 <= {S(a, p)} <= {_num(M)}")

        # loads
        for a in V:
            lp.bounds.append(f" 0 <= {YF(a, p)} <= {K}")
            lp.generals.append(YF(a, p))
            for j in range(n_e):
                hi = 0 if (isinstance(a, tuple) and a[0] == h_of[j]) or a in (s, s_end) else K
                lp.bounds.append(f" 0 <= {U(j, a, p)} <= {hi}")
                lp.generals.append(U(j, a, p))
            lp.row(f"capacity_{_node_name(a)}_{p}", [(1, YF(a, p))] + [(1, U(j, a, p)) for j in range(n_e)], "<=", K)
            if a in inner:
                lp.row(f"idle_load_{_node_name(a)}_{p}", [(1, YF(a, p))] + [(1, U(j, a, p)) for j in range(n_e)]
                       + [(-K, Vis(a, p))], "<=", 0)
        lp.row(f"start_full_{p}", [(1, YF(s, p))], "=", 0)
        lp.row(f"end_full_{p}", [(1, YF(s_end, p))], "=", 0)
        for a, b in arcs:
            na, nb = _node_name(a), _node_name(b)
            kb = kind(b)
            step_f = 1 if kb is NodeKind.ORIGIN else (-1 if kb is NodeKind.DESTINATION else 0)
            lp.row(f"full_up_{na}_{nb}_{p}", [(1, YF(b, p)), (-1, YF(a, p)), (-ML, X(a, b, p))], ">=", step_f - ML)
            lp.row(f"full_dn_{na}_{nb}_{p}", [(1, YF(b, p)), (-1, YF(a, p)), (ML, X(a, b, p))], "<=", step_f + ML)
            for j in range(n_e):
                if isinstance(b, tuple) and b[0] == h_of[j]:
                    # the call drops everything picked up for order j
                    e = E(j, b[1], p)
                    lp.row(f"drop_up_{j}_{na}_{nb}_{p}", [(1, e), (-1, U(j, a, p)), (-ML, X(a, b, p))], ">=", -ML)
                    lp.row(f"drop_dn_{j}_{na}_{nb}_{p}", [(1, e), (-1, U(j, a, p)), (ML, X(a, b, p))], "<=", ML)
                    continue
                gain = []
                if kb is NodeKind.BARGE:
                    gain = [(-1, XH(i, b, p, j, v)) for i in in_arcs[b] for v in (1, 2)]
                lp.row(f"empty_up_{j}_{na}_{nb}_{p}", [(1, U(j, b, p)), (-1, U(j, a, p))] + gain + [(-ML, X(a, b, p))],
                       ">=", -ML)
                lp.row(f"empty_dn_{j}_{na}_{nb}_{p}", [(1, U(j, b, p)), (-1, U(j, a, p))] + gain + [(ML, X(a, b, p))],
                       "<=", ML)

    # coverage across tugboats
    for k, o in enumerate(inst.orders_f):
        lp.row(f"cover_origin_{k}", [(1, Vis(o.origin, p)) for p in P], "=", 1)
        lp.row(f"cover_destination_{k}", [(1, Vis(o.destination, p)) for p in P], "=", 1)
    for b in barges:
        lp.row(f"barge_once_{b}", [(1, Vis(b, p)) for p in P], "<=", 1)
    for j, o in enumerate(inst.orders_e):
        lp.row(f"demand_{j}", [(1, E(j, v, p)) for p in P for v in (1, 2)], "=", o.required_barges)
        lp.row(f"two_tugboats_{j}", [(1, Vis((o.destination, 1), p)) for p in P], "<=", 2)

    lines = ["\\ drop-and-pull tugboat scheduling", "Minimize", f" cost: {_Lp.expr(objective)}", "Subject To"]
    lines += lp.rows
    lines.append("Bounds")
    lines += lp.bounds
    if lp.generals:
        lines.append("Generals")
        lines += [" " + g for g in lp.generals]
    lines.append("Binaries")
    lines += [" " + b for b in lp.binaries]
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp(inst: Instance, path, cfg: MipConfig = MipConfig()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_lp(inst, cfg))
