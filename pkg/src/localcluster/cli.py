"""Command-line front end: cluster, sweep, verify, stats.

Exit codes: 0 success, 1 IO/parse failure, 2 invalid configuration or input
values, 3 solver budget exhausted (a partial report is still written),
4 instance too large for the dense verification oracle.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import oracle
from .appr import ApprVariant, appr_solve
from .graph import EdgeListParseError, EmptyGraphError, Graph, load_graph, degree_histogram
from .ista import ista_solve
from .model import (
    BudgetExhaustedError,
    SeedDistribution,
    SolverParams,
    SparseVector,
    parse_seed_spec,
)
from .sweep import profile_rows, sweep_cut, write_profile_csv

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_CAP = 4

METHODS = ("ista", "appr-fifo", "appr-greedy", "appr-heuristic")

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    """Invalid configuration or input values (exit code 2)."""


def _configure_logging() -> None:
    level = os.environ.get("LOCALCLUSTER_LOG", "").upper()
    if level:
        logging.basicConfig(level=getattr(logging, level, logging.INFO))


def _load(path: str) -> Graph:
    return load_graph(path)


def _seed_from_spec(g: Graph, spec: str) -> SeedDistribution:
    try:
        pairs = parse_seed_spec(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    mapped = []
    for orig, w in pairs:
        try:
            mapped.append((g.index_of(orig), w))
        except KeyError:
            raise ConfigError(f"seed node {orig} not present in graph") from None
    try:
        return SeedDistribution.from_pairs(g, mapped, normalize=True)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _params_from_args(args: argparse.Namespace) -> SolverParams:
    try:
        return SolverParams(
            alpha=args.alpha, rho=args.rho, epsilon=args.epsilon, max_iters=args.max_iters
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _run_method(g: Graph, seed: SeedDistribution, params: SolverParams, method: str, trace_fh):
    if method == "ista":
        res = ista_solve(g, seed, params, trace=trace_fh)
        stats = {
            "iterations": res.iterations,
            "touched": len(res.touched_nodes),
            "nnz": len(res.support),
        }
        return res.p, stats
    variant = ApprVariant(method.removeprefix("appr-"))
    res = appr_solve(g, seed, params, variant)
    support = res.p.support()
    stats = {
        "iterations": res.iterations,
        "pushes": res.push_count,
        "touched": len(res.touched_nodes),
        "nnz": len(support),
    }
    return res.p, stats


def _cut_and_profile(g: Graph, p: SparseVector):
    if not p.support():
        return None, [], ""
    prof = sweep_cut(g, p)
    best = {
        "nodes": [g.original_id(i) for i in prof.best_set],
        "conductance": prof.best_conductance,
        "volume": prof.best_set.volume,
    }
    buf = io.StringIO()
    write_profile_csv(g, p, prof, buf)
    return best, profile_rows(g, p, prof), buf.getvalue()


def _emit(args: argparse.Namespace, report: dict, csv_text: str | None = None) -> None:
    if getattr(args, "format", "json") == "csv" and csv_text is not None:
        payload = csv_text
    else:
        payload = json.dumps(report, indent=2) + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(payload)
    else:
        sys.stdout.write(payload)


def cmd_stats(args: argparse.Namespace) -> int:
    g = _load(args.graph)
    report = {
        "n": g.node_count,
        "m": g.edge_count,
        "degree_histogram": [[d, c] for d, c in degree_histogram(g)],
    }
    _emit(args, report)
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    g = _load(args.graph)
    params = _params_from_args(args)
    if args.trace and args.method != "ista":
        raise ConfigError("--trace is only available for the ista method")
    if args.format == "csv" and args.method == "all":
        raise ConfigError("--format csv requires a single method")
    if args.seed_search and args.seed:
        raise ConfigError("--seed and --seed-search are mutually exclusive")
    if not args.seed_search and not args.seed:
        raise ConfigError("one of --seed or --seed-search is required")

    config = {
        "graph": args.graph,
        "seed": args.seed if args.seed else None,
        "seed_search": args.seed_search if args.seed_search else None,
        "alpha": params.alpha,
        "rho": params.rho,
        "epsilon": params.epsilon,
        "max_iters": params.max_iters,
        "method": args.method,
    }

    if args.seed_search:
        return _cluster_seed_search(args, g, params, config)

    seed = _seed_from_spec(g, args.seed)
    methods = list(METHODS) if args.method == "all" else [args.method]

    partial = False
    per_method = {}
    csv_text = None
    for method in methods:
        trace_fh = open(args.trace, "w", newline="") if args.trace and method == "ista" else None
        start = time.perf_counter()
        try:
            p, stats = _run_method(g, seed, params, method, trace_fh)
        except BudgetExhaustedError as exc:
            p = exc.partial.p
            stats = {
                "iterations": exc.partial.iterations,
                "touched": len(exc.partial.touched_nodes),
                "nnz": len(p.support()),
            }
            partial = True
        finally:
            if trace_fh is not None:
                trace_fh.close()
        wall_ms = 1000.0 * (time.perf_counter() - start)
        best, rows, method_csv = _cut_and_profile(g, p)
        if args.timing:
            stats["wall_ms"] = wall_ms
        per_method[method] = {"stats": stats, "best_cut": best, "profile": rows}
        if method == methods[0]:
            csv_text = method_csv

    if args.method == "all":
        report = {
            "config": config,
            "methods": {
                m: {"stats": d["stats"], "best_cut": d["best_cut"]} for m, d in per_method.items()
            },
        }
    else:
        d = per_method[args.method]
        report = {
            "config": config,
            "stats": d["stats"],
            "best_cut": d["best_cut"],
            "profile": d["profile"],
        }
    if partial:
        report["partial"] = True
    _emit(args, report, csv_text)
    return EXIT_BUDGET if partial else EXIT_OK


def _cluster_seed_search(args, g: Graph, params: SolverParams, config: dict) -> int:
    method = args.method
    if method == "all":
        raise ConfigError("--seed-search expects a single method")
    try:
        seed_ids = [int(tok) for tok in args.seed_search.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"malformed seed list {args.seed_search!r}") from None
    if not seed_ids:
        raise ConfigError("empty seed list")

    entries = []
    for orig in seed_ids:
        seed = _seed_from_spec(g, str(orig))
        p, stats = _run_method(g, seed, params, method, None)
        best, _, _ = _cut_and_profile(g, p)
        entries.append(
            {
                "seed": orig,
                "nnz": stats["nnz"],
                "best_conductance": best["conductance"] if best else None,
                "best_set_size": len(best["nodes"]) if best else 0,
            }
        )
    scored = [e for e in entries if e["best_conductance"] is not None]
    best_entry = min(scored, key=lambda e: e["best_conductance"]) if scored else None
    report = {"config": config, "seed_search": entries, "best_seed": best_entry}
    _emit(args, report)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    g = _load(args.graph)
    entries: dict[int, float] = {}
    with open(args.pfile) as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise EdgeListParseError(lineno, f"expected 'node value', got {len(parts)} fields")
            try:
                orig = int(parts[0])
                val = float(parts[1])
            except ValueError:
                raise EdgeListParseError(lineno, f"malformed row {parts!r}") from None
            try:
                i = g.index_of(orig)
            except KeyError:
                raise ConfigError(f"node {orig} not present in graph (line {lineno})") from None
            if val < 0.0:
                raise ConfigError(f"negative value {val} for node {orig} (line {lineno})")
            if i in entries:
                raise ConfigError(f"duplicate row for node {orig} (line {lineno})")
            entries[i] = val
    p = SparseVector(entries).compact()
    if not p.entries:
        raise ConfigError("empty vector: nothing to sweep")
    prof = sweep_cut(g, p)
    buf = io.StringIO()
    write_profile_csv(g, p, prof, buf)
    best = {
        "nodes": [g.original_id(i) for i in prof.best_set],
        "conductance": prof.best_conductance,
        "volume": prof.best_set.volume,
    }
    report = {"best_cut": best, "profile": profile_rows(g, p, prof)}
    _emit(args, report, buf.getvalue())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = _load(args.graph)
    if g.node_count > args.node_cap:
        sys.stderr.write(
            f"error: graph has {g.node_count} nodes, above the dense-oracle cap "
            f"{args.node_cap}; verification refused\n"
        )
        return EXIT_CAP
    params = _params_from_args(args)
    seed = _seed_from_spec(g, args.seed)

    res = ista_solve(g, seed, params, validate=True)
    q = res.q.copy()
    if args.inject_fault:
        target = next(iter(q.entries), None)
        if target is None:
            target = next(iter(seed.entries))
        q.add(target, 0.1)

    q_star = oracle.dense_l1_ppr(g, seed, params, node_cap=args.node_cap)
    p_dense = q.to_dense(g.node_count) * g.sqrt_degrees
    linf_gap = float(np.abs(p_dense - q_star * g.sqrt_degrees).max())

    report_kkt = oracle.check_optimality(g, seed, params, q, node_cap=args.node_cap)
    sd = g.sqrt_degrees
    thresh = params.rho * params.alpha * sd
    grad = oracle.dense_gradient(g, seed, params.alpha, q.to_dense(g.node_count))
    qd = q.to_dense(g.node_count)
    # minimal-norm subgradient of psi at q certifies the gap via strong convexity
    sub = np.where(qd > 0.0, grad + thresh, np.sign(grad) * np.maximum(np.abs(grad) - thresh, 0.0))
    gap_bound = float(sd.max() * np.linalg.norm(sub) / params.alpha)
    kkt_bound = params.epsilon * params.rho * params.alpha * float(sd.max()) + 1e-9

    support = set(q.support())
    oracle_support = {int(i) for i in np.nonzero(q_star)[0]}
    vol_support = int(g.degrees[sorted(support)].sum()) if support else 0
    vol_limit = 1.0 / params.rho  # seed mass is 1
    checks = {
        "kkt": report_kkt.max_violation <= kkt_bound,
        "gap": linf_gap <= gap_bound * (1.0 + 1e-6) + 1e-12,
        "volume_bound": vol_support <= vol_limit,
        "support_nested": support <= oracle_support,
    }
    report = {
        "config": {
            "graph": args.graph,
            "seed": args.seed,
            "alpha": params.alpha,
            "rho": params.rho,
            "epsilon": params.epsilon,
            "fault_injected": bool(args.inject_fault),
        },
        "kkt_max_violation": report_kkt.max_violation,
        "kkt_bound": kkt_bound,
        "linf_gap": linf_gap,
        "gap_bound": gap_bound,
        "support_volume": vol_support,
        "volume_limit": vol_limit,
        "checks": checks,
        "ok": all(checks.values()),
    }
    _emit(args, report)
    return EXIT_OK if report["ok"] else EXIT_IO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localcluster",
        description="Local graph clustering via l1-regularized PageRank",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("graph", help="edge-list file ('u v' per line, '#' comments)")
        sp.add_argument("--output", help="write the report here instead of stdout")

    def add_params(sp):
        sp.add_argument("--seed", help="seed spec: '7' or '7:0.5,9:0.5' (input node labels)")
        sp.add_argument("--alpha", type=float, default=0.1, help="teleportation weight")
        sp.add_argument("--rho", type=float, default=1e-5, help="l1 regularization scale")
        sp.add_argument("--epsilon", type=float, default=0.1, help="termination slack")
        sp.add_argument("--max-iters", type=int, default=1_000_000, help="iteration budget")

    sp = sub.add_parser("stats", help="graph size and degree histogram")
    add_common(sp)
    sp.set_defaults(handler=cmd_stats)

    sp = sub.add_parser("cluster", help="solve and sweep for a low-conductance set")
    add_common(sp)
    add_params(sp)
    sp.add_argument("--method", choices=METHODS + ("all",), default="ista")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--trace", help="write per-iteration CSV trace (ista only)")
    sp.add_argument("--timing", action="store_true", help="include wall_ms in the report")
    sp.add_argument("--seed-search", help="comma-separated node labels to scan")
    sp.set_defaults(handler=cmd_cluster)

    sp = sub.add_parser("sweep", help="sweep an existing 'node value' vector file")
    add_common(sp)
    sp.add_argument("pfile", help="rows of 'node value' (input node labels)")
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    sp.set_defaults(handler=cmd_sweep)

    sp = sub.add_parser("verify", help="check solver output against the dense oracle")
    add_common(sp)
    add_params(sp)
    sp.add_argument("--node-cap", type=int, default=oracle.DEFAULT_NODE_CAP)
    sp.add_argument("--inject-fault", action="store_true", help="corrupt the output first (negative control)")
    sp.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (EdgeListParseError, EmptyGraphError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except BudgetExhaustedError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
