"""``feeplan`` command line: evaluate, optimize, search, generate and benchmark."""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .core import GraphError, evaluate_profit
from .instance_io import (
    InstanceFile,
    InstanceParseError,
    Topology,
    decisions_to_json,
    dumps,
    format_rational,
    generate_instance,
    instance_digest,
    parse_instance,
    serialize_instance,
)
from .oracle import SearchCapError, SearchConfig, cndf_brute_force
from .path_opt import MAX_BRUTE_FORCE_EDGES, PathInstance, brute_force_path, solve_path
from .star_opt import build_star, certify_near_optimality, empirical_check, star_profit
from .tree_opt import TreeInstance, build_lp, check_serve_all, grid_max, optimize_tree

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVARIANT = 4
EXIT_CAP = 5
EXIT_VERIFY = 6

BENCH_WARN_N = 150
BENCH_MAX_N = 300


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str) -> InstanceFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from None
    try:
        return parse_instance(text)
    except InstanceParseError as exc:
        raise CliError(EXIT_PARSE, f"parse error in field {exc}") from None


def _report(command: str, inst: InstanceFile, started: float, extra: dict | None = None) -> dict:
    graph = inst.graph()
    ev = evaluate_profit(graph, inst.evaluation_matrix())
    out = {
        "command": command,
        "version": __version__,
        "instance_digest": instance_digest(inst),
        "revenue": format_rational(ev.revenue),
        "profit": format_rational(ev.profit),
        "edge_cost": ev.edge_cost,
        "fees": {f"{u}-{v}": format_rational(f) for (u, v), f in zip(inst.topology.edges, inst.fees)},
        "decisions": decisions_to_json(ev),
        "instance": inst.to_dict(),
    }
    if inst.seed is not None:
        out["seed"] = inst.seed
    if extra:
        out.update(extra)
    out["timings"] = {"wall_seconds": round(time.perf_counter() - started, 6)}
    return out


def _summary(report: dict) -> None:
    parts = [f"{k}={float(Fraction(report[k])):.4f}" for k in ("revenue", "profit") if k in report]
    print(f"summary (decimal, approximate): {report['command']} " + " ".join(parts), file=sys.stderr)


def _require_kind(inst: InstanceFile, kinds: tuple[str, ...], command: str) -> None:
    if inst.topology is not None and inst.topology.kind not in kinds:
        raise CliError(EXIT_INVARIANT, f"{command} needs topology kind {'/'.join(kinds)}, got {inst.topology.kind}")


def cmd_evaluate(args) -> dict:
    started = time.perf_counter()
    inst = _load(args.input)
    if inst.topology is None or inst.fees is None:
        raise CliError(EXIT_PARSE, "parse error in field topology/fees: evaluate needs both")
    return _report("evaluate", inst, started)


def cmd_optimize_path(args) -> dict:
    started = time.perf_counter()
    inst = _load(args.input)
    _require_kind(inst, ("path",), "optimize-path")
    if inst.n < 2:
        raise CliError(EXIT_INVARIANT, "path needs at least two nodes")
    pinst = PathInstance(inst.matrix)
    plan = solve_path(pinst)
    sol = plan.solution
    extra = {"fee_one_edges": list(sol.fee_one_edges), "dp_revenue": sol.revenue}
    if args.verify:
        if pinst.m > MAX_BRUTE_FORCE_EDGES:
            raise CliError(EXIT_CAP, f"--verify enumerates 2^m sets; m={pinst.m} exceeds {MAX_BRUTE_FORCE_EDGES}")
        bf = brute_force_path(pinst)
        if bf.revenue != sol.revenue:
            raise CliError(EXIT_VERIFY, f"verification failed: dp revenue {sol.revenue}, brute force {bf.revenue}")
        extra["verification"] = {"method": "brute_force_2^m", "brute_force_revenue": bf.revenue, "ok": True}
    topo = Topology("path", tuple((k, k + 1) for k in range(1, inst.n)))
    out = InstanceFile(inst.matrix, topo, tuple(Fraction(f) for f in sol.fees(pinst.m)), inst.seed)
    return _report("optimize-path", out, started, extra)


def cmd_optimize_tree(args) -> dict:
    started = time.perf_counter()
    inst = _load(args.input)
    if inst.topology is None:
        raise CliError(EXIT_INVARIANT, "optimize-tree needs a topology")
    _require_kind(inst, ("tree", "path"), "optimize-tree")
    tinst = TreeInstance(inst.matrix, inst.topology.edges)
    sol = optimize_tree(tinst, strict=args.strict)
    extra = {
        "lp": {
            "objective_value": format_rational(sol.lp.objective_value),
            "dual_value": format_rational(sol.lp.dual_value),
            "row_duals": [format_rational(y) for y in sol.lp.row_duals],
            "bound_duals": [format_rational(y) for y in sol.lp.bound_duals],
            "pivots": sol.lp.pivots,
        }
    }
    if args.verify:
        check_serve_all(tinst, sol)
        q = args.grid_q or 10
        best, _ = grid_max(build_lp(tinst, strict=args.strict), q)
        if Fraction(best, q) > sol.revenue:
            raise CliError(EXIT_VERIFY, f"verification failed: LP {sol.revenue} < grid {Fraction(best, q)}")
        extra["verification"] = {"method": f"grid_dominance_q{q}", "grid_best": format_rational(Fraction(best, q)), "ok": True}
    out = InstanceFile(inst.matrix, inst.topology, sol.fees, inst.seed)
    return _report("optimize-tree", out, started, extra)


def cmd_star(args) -> dict:
    started = time.perf_counter()
    inst = _load(args.input)
    t = inst.matrix
    star = build_star(t.n)
    cert = certify_near_optimality(t)
    extra = {
        "star_profit": format_rational(cert.star_profit),
        "upper_bound": format_rational(cert.upper_bound),
        "gap": format_rational(cert.gap),
    }
    if args.verify:
        cfg_n = args.max_n or 5
        if t.n > cfg_n:
            raise CliError(EXIT_CAP, f"--verify runs the oracle; n={t.n} exceeds --max-n {cfg_n}")
        chk = empirical_check(t, grid_q=args.grid_q or 4, workers=args.threads)
        if not chk.holds:
            raise CliError(
                EXIT_VERIFY,
                f"verification failed: star {chk.star_profit} < oracle {chk.oracle_profit} - 1",
            )
        extra["verification"] = {
            "method": f"connected_oracle_q{args.grid_q or 4}",
            "oracle_profit": format_rational(chk.oracle_profit),
            "ok": True,
        }
    topo = Topology("star", star.graph.edges)
    out = InstanceFile(t, topo, tuple(star.graph.fees.values()), inst.seed)
    report = _report("star", out, started, extra)
    if Fraction(report["profit"]) != star_profit(t):
        raise CliError(EXIT_VERIFY, "closed form and evaluator disagree")
    return report


def cmd_brute_force(args) -> dict:
    started = time.perf_counter()
    inst = _load(args.input)
    try:
        cfg = SearchConfig(max_n=args.max_n or 5, grid_q=args.grid_q or 4, connected_only=args.connected_only)
        graphs = None
        if inst.topology is not None and args.fixed_topology:
            if inst.topology.kind == "star":
                raise CliError(EXIT_INVARIANT, "--fixed-topology does not support star files")
            graphs = [inst.topology.edges]
        res = cndf_brute_force(inst.matrix, cfg, graphs=graphs, workers=args.threads)
    except SearchCapError as exc:
        raise CliError(EXIT_CAP, str(exc)) from None
    extra = {
        "search": {
            "max_n": cfg.max_n,
            "grid_q": cfg.grid_q,
            "connected_only": cfg.connected_only,
            "candidates": res.candidates,
            "note": "grid optimum; a lower bound on the unrestricted optimum",
        }
    }
    out = InstanceFile(inst.matrix, Topology("general", res.edges), res.fees, inst.seed)
    report = _report("brute-force", out, started, extra)
    if args.verify:
        if Fraction(report["profit"]) != res.profit:
            raise CliError(EXIT_VERIFY, f"verification failed: search {res.profit}, evaluator {report['profit']}")
        report["verification"] = {"method": "re_evaluate", "ok": True}
    return report


def cmd_gen(args) -> dict | str:
    try:
        inst = generate_instance(args.n, args.density, args.max_demand, args.seed, args.kind)
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    return serialize_instance(inst)


def fit_slope(sizes, seconds) -> float:
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.maximum(np.asarray(seconds, dtype=float), 1e-9))
    return float(np.polyfit(x, y, 1)[0])


def run_bench(sizes, seeds: int = 3, base_seed: int = 0, repeats: int = 1) -> dict:
    """Time tensor construction plus the DP on random path instances."""
    rows = []
    for n in sizes:
        times = []
        for s in range(seeds):
            inst = generate_instance(n, 1.0, 9, base_seed + s)
            pinst = PathInstance(inst.matrix)
            best = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                solve_path(pinst)
                best = min(best, time.perf_counter() - t0)
            times.append(best)
        rows.append({"n": n, "median_seconds": statistics.median(times), "runs": len(times)})
    slope = fit_slope([r["n"] for r in rows], [r["median_seconds"] for r in rows]) if len(rows) > 1 else None
    for r in rows:
        r["slope"] = slope
    return {"command": "bench", "version": __version__, "rows": rows, "slope": slope, "seed": base_seed}


def cmd_bench(args) -> dict:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise CliError(EXIT_USAGE, f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    if not sizes:
        raise CliError(EXIT_USAGE, "--sizes is empty")
    if any(n < 2 for n in sizes):
        raise CliError(EXIT_USAGE, "sizes must be >= 2")
    too_big = [n for n in sizes if n > BENCH_MAX_N]
    if too_big:
        raise CliError(EXIT_CAP, f"size cap: tensor needs O(n^3) memory; n={too_big[0]} exceeds {BENCH_MAX_N}")
    for n in sizes:
        if n > BENCH_WARN_N:
            print(f"warning: n={n} allocates a {n - 1}^3 usage tensor", file=sys.stderr)
    return run_bench(sizes, args.seeds, args.seed or 0)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feeplan", description=__doc__)
    p.add_argument("--version", action="version", version=f"feeplan {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, metavar="PATH")
        sp.add_argument("--output", metavar="PATH")
        sp.add_argument("--threads", type=int, default=1)
        return sp

    common(sub.add_parser("evaluate", help="score a topology + fee file"))
    sp = common(sub.add_parser("optimize-path", help="optimal 0/1 fees on a path"))
    sp.add_argument("--verify", action="store_true")
    sp = common(sub.add_parser("optimize-tree", help="serve-all LP on a tree"))
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--strict", action="store_true", help="constrain every pair, not only demanded ones")
    sp.add_argument("--grid-q", type=int)
    sp = common(sub.add_parser("star", help="hub star and its near-optimality gap"))
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--grid-q", type=int)
    sp = common(sub.add_parser("brute-force", help="exhaustive graph and grid-fee search"))
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--grid-q", type=int)
    sp.add_argument("--connected-only", action="store_true")
    sp.add_argument("--fixed-topology", action="store_true", help="search fees only on the file's topology")
    sp = common(sub.add_parser("gen", help="seeded random instance"), needs_input=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--density", type=float, default=1.0)
    sp.add_argument("--max-demand", type=int, default=9)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--kind", choices=("path", "tree", "star", "general"))
    sp = common(sub.add_parser("bench", help="time the path DP"), needs_input=False)
    sp.add_argument("--sizes", required=True, help="comma-separated node counts")
    sp.add_argument("--seeds", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "evaluate": cmd_evaluate,
    "optimize-path": cmd_optimize_path,
    "optimize-tree": cmd_optimize_tree,
    "star": cmd_star,
    "brute-force": cmd_brute_force,
    "gen": cmd_gen,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except CliError as exc:
        print(f"feeplan {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (GraphError, ValueError) as exc:
        print(f"feeplan {args.command}: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except AssertionError as exc:
        print(f"feeplan {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    text = result if isinstance(result, str) else dumps(result)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if isinstance(result, dict) and "profit" in result:
        _summary(result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
