"""Command line entry point ``barge-alns``.

Exit codes: 0 on success (for ``solve``: complete and penalty-free; for
``validate``: no violation), 2 when the result carries penalties or
violations, 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .engine import SearchConfig, solve, solve_multistart
from .errors import BargeAlnsError
from .evaluation import Schedule, loss
from .generator import PRESETS, TINY_MIXES, generate_raw, tiny_raw
from .mip import MipConfig, export_lp
from .model import PenaltyConfig, build_instance, dumps_canonical, load_instance
from .oracle import optimum
from .report import BenchmarkRow, benchmark_csv, improvement_pct, route_geojson, route_svg
from .solution import solution_from_raw, solution_to_raw
from .validator import validate

log = logging.getLogger("barge_alns")

EXIT_OK, EXIT_ERROR, EXIT_PENALISED = 0, 1, 2


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _penalties(raw: str | None) -> PenaltyConfig | None:
    """``tw,hours,unserved`` weights or a JSON file with those keys."""
    if raw is None:
        return None
    if Path(raw).is_file():
        doc = json.loads(Path(raw).read_text(encoding="utf-8"))
        return PenaltyConfig(**{k: float(v) for k, v in doc.items()})
    parts = [float(x) for x in raw.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--penalties takes tw,hours,unserved")
    return PenaltyConfig(*parts)


def _config(args) -> SearchConfig:
    return SearchConfig(
        t_initial=args.t_init, cooling=args.cooling, t_min=args.t_min, iter_max_no_improve=args.iter_max,
        family_b=args.family_b, seed=args.seed, step=args.step, max_iterations=args.max_iterations,
        time_limit=args.time_limit, regret_literal=args.regret_literal, penalties=_penalties(args.penalties),
    )


def _load_solution(inst, path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    raw = doc.get("solution", doc)
    sched = Schedule.from_raw(doc["schedule"]) if "schedule" in doc else None
    return solution_from_raw(inst, raw), sched


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    if args.tiny:
        raw = tiny_raw(args.seed, args.tiny, args.windows)
    else:
        raw = generate_raw(args.row, args.topology, args.seed)
    inst = build_instance(raw)
    _write(args.output, dumps_canonical(inst.to_raw()))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    cfg = _config(args)
    if args.multistart > 1:
        res, runs = solve_multistart(inst, cfg, args.multistart, args.threads)
    else:
        res = solve(inst, cfg)
    st = res.stats
    doc = {
        "instance": inst.name,
        "seed": st.seed,
        "solution": solution_to_raw(inst, res.solution),
        "schedule": res.schedule.to_raw(),
        "loss": res.loss.to_raw(),
        "initial_loss": st.initial_loss,
        "iterations": st.iterations,
        "improvement_pct": st.improvement_pct,
    }
    _write(args.output, dumps_canonical(doc))
    if args.stats:
        Path(args.stats).write_text(st.iterations_csv(), encoding="utf-8")
    if args.weights:
        Path(args.weights).write_text(st.weights_csv(), encoding="utf-8")
    log.info("loss %.4f (initial %.4f) after %d iterations; construction %.2fs, search %.2fs",
             res.loss.total, st.initial_loss, st.iterations, st.construction_time, st.search_time)
    complete = not res.solution.unassigned_f and not res.solution.pending_e()
    if complete and res.loss.penalties == 0 and not validate(inst, res.solution):
        return EXIT_OK
    return EXIT_PENALISED


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    sol, sched = _load_solution(inst, args.solution)
    out = validate(inst, sol, sched if args.check_schedule else None)
    doc = {"feasible": not out, "violations": [v.to_raw() for v in out], "loss": loss(inst, sol).to_raw()}
    _write(args.output, dumps_canonical(doc))
    return EXIT_OK if not out else EXIT_PENALISED


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    sol, val = optimum(inst, max_nodes=args.max_nodes)
    doc = {"instance": inst.name, "solution": solution_to_raw(inst, sol), "loss": loss(inst, sol).to_raw()}
    _write(args.output, dumps_canonical(doc))
    return EXIT_OK


def cmd_export_mip(args) -> int:
    inst = load_instance(args.instance)
    cfg = MipConfig(big_m=args.big_m, time_horizon=args.time_horizon, max_variables=args.max_variables)
    _write(args.output, export_lp(inst, cfg))
    return EXIT_OK


def run_benchmark(topology: str, rows, repeats: int, cfg: SearchConfig, instance_seed: int = 0,
                  best_known: float | None = None) -> list[BenchmarkRow]:
    """Solve one generated instance per row with solver seeds ``1..repeats``."""
    out = []
    for row in rows:
        inst = build_instance(generate_raw(row, topology, instance_seed))
        for trial in range(1, repeats + 1):
            res = solve(inst, replace(cfg, seed=trial))
            st = res.stats
            out.append(BenchmarkRow(topology, row, trial, trial, st.construction_time, st.search_time,
                                    st.initial_loss, st.final_loss, st.iterations,
                                    improvement_pct(st.initial_loss, st.final_loss, best_known)))
    return out


def cmd_benchmark(args) -> int:
    rows = [int(r) for r in args.rows.split(",")]
    table = run_benchmark(args.topology, rows, args.repeats, _config(args), args.instance_seed)
    _write(args.output, benchmark_csv(table))
    return EXIT_OK


def cmd_report(args) -> int:
    inst = load_instance(args.instance)
    sol, _ = _load_solution(inst, args.solution)
    if args.svg:
        Path(args.svg).write_text(route_svg(inst, sol), encoding="utf-8")
    if args.geojson:
        Path(args.geojson).write_text(dumps_canonical(route_geojson(inst, sol)), encoding="utf-8")
    if not args.svg and not args.geojson:
        sys.stdout.write(route_svg(inst, sol))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _search_flags(p: argparse.ArgumentParser) -> None:
    d = SearchConfig()
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--step", type=int, default=None, help="entities removed per destroy call")
    p.add_argument("--family-b", type=int, default=d.family_b, help="typeE family chosen with probability 1/b")
    p.add_argument("--t-init", type=float, default=d.t_initial)
    p.add_argument("--cooling", type=float, default=d.cooling)
    p.add_argument("--t-min", type=float, default=d.t_min)
    p.add_argument("--iter-max", type=int, default=d.iter_max_no_improve, help="iterations without a new best")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None, help="search seconds")
    p.add_argument("--penalties", default=None, help="tw,hours,unserved weights or a JSON file")
    p.add_argument("--regret-literal", action="store_true", help="insert the smallest-regret entity first")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="barge-alns", description="Drop-and-pull tugboat scheduling with ALNS.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a seeded instance")
    p.add_argument("--row", type=int, default=1, choices=sorted(PRESETS["oceanic"]))
    p.add_argument("--topology", default="oceanic", choices=sorted(PRESETS))
    p.add_argument("--tiny", choices=TINY_MIXES, default=None, help="desk-size instance instead of a preset")
    p.add_argument("--windows", choices=("loose", "tight"), default="loose")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run the search on an instance")
    p.add_argument("instance")
    p.add_argument("-o", "--output", default=None, help="solution JSON (stdout by default)")
    p.add_argument("--stats", default=None, help="per-iteration CSV")
    p.add_argument("--weights", default=None, help="per-segment operator weights CSV")
    p.add_argument("--multistart", type=int, default=1)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default BARGE_ALNS_THREADS or 1)")
    _search_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a solution against every constraint")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--check-schedule", action="store_true", help="also check the schedule stored in the file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance by enumeration")
    p.add_argument("instance")
    p.add_argument("--max-nodes", type=int, default=12)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-mip", help="write the model as an LP file")
    p.add_argument("instance")
    p.add_argument("--big-m", type=float, default=None)
    p.add_argument("--time-horizon", type=float, default=None)
    p.add_argument("--max-variables", type=int, default=MipConfig().max_variables)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_export_mip)

    p = sub.add_parser("benchmark", help="repeat runs on preset rows and tabulate")
    p.add_argument("--topology", default="oceanic", choices=sorted(PRESETS))
    p.add_argument("--rows", default="1")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    _search_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("report", help="draw a solution as SVG and/or GeoJSON")
    p.add_argument("solution")
    p.add_argument("instance")
    p.add_argument("--svg", default=None)
    p.add_argument("--geojson", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (BargeAlnsError, OSError, ValueError, KeyError, argparse.ArgumentTypeError) as exc:
        print(f"barge-alns: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
