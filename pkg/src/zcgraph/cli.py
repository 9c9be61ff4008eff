"""Command-line interface.

Subcommands: gen (write a synthetic graph binary), convert (text edge list
to binary), stats (degree summary), run (full experiment), micro (fixed
warp-access patterns through the coalescer). A flat key=value config file
can seed any subcommand's flags; explicit flags override file values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .access import REGION_EDGES, WARP_LANES, WarpAccess
from .coalesce import coalesce_trace
from .csr import (DEFAULT_GRAPH_SEED, DEFAULT_SOURCE_SEED, DEFAULT_WEIGHT_SEED,
                  degree_cdf, generate_powerlaw, generate_uniform,
                  load_csr_binary, load_edge_list_text, store_csr_binary,
                  symmetrized, with_uniform_weights)
from .link import GIB, LinkModel
from .report import ExperimentConfig, run_experiment

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}
_SWITCH_KEYS = {"undirected", "json", "weights"}


def _read_config_tokens(path: str) -> list[str]:
    """Turn key=value lines into CLI tokens; switches accept true/false."""
    tokens: list[str] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if key in _SWITCH_KEYS:
                low = value.lower()
                if low in _TRUE_WORDS:
                    tokens.append(flag)
                elif low not in _FALSE_WORDS:
                    raise ValueError(f"{path}:{lineno}: {key} must be true/false")
            else:
                tokens.extend([flag, value])
    return tokens


def _apply_config(argv: list[str]) -> list[str]:
    out = list(argv)
    path = None
    for i, arg in enumerate(out):
        if arg == "--config":
            if i + 1 >= len(out):
                raise ValueError("--config needs a file path")
            path = out[i + 1]
            del out[i:i + 2]
            break
        if arg.startswith("--config="):
            path = arg.split("=", 1)[1]
            del out[i]
            break
    if path is None:
        return out
    return out[:1] + _read_config_tokens(path) + out[1:]


def _add_generator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--generator", choices=["uniform", "powerlaw"])
    p.add_argument("--vertices", type=int, default=100_000)
    p.add_argument("--avg-degree", type=float, default=71.0)
    p.add_argument("--min-degree", type=int, default=16)
    p.add_argument("--max-degree", type=int, default=48)
    p.add_argument("--exponent", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=DEFAULT_GRAPH_SEED)
    p.add_argument("--edge-bytes", type=int, choices=[4, 8], default=4)
    p.add_argument("--weight-bytes", type=int, choices=[4, 8], default=4)
    p.add_argument("--undirected", action="store_true")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zcgraph",
        description="Warp-level host-memory graph traffic simulator")
    parser.add_argument("--config", help="flat key=value file; flags override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic graph binary")
    _add_generator_flags(p)
    p.add_argument("--graph", required=True, help="output binary path")
    p.add_argument("--weights", action="store_true",
                   help="attach uniform integer weights")
    p.add_argument("--weight-seed", type=int, default=DEFAULT_WEIGHT_SEED)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("convert", help="convert a text edge list to binary")
    p.add_argument("input", help="text edge list (src dst [weight] per line)")
    p.add_argument("--graph", required=True, help="output binary path")
    p.add_argument("--vertices", type=int, default=None)
    p.add_argument("--edge-bytes", type=int, choices=[4, 8], default=4)
    p.add_argument("--weight-bytes", type=int, choices=[4, 8], default=4)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("stats", help="degree summary and CDF of a graph")
    _add_generator_flags(p)
    p.add_argument("--graph", help="binary graph path (instead of a generator)")
    p.add_argument("--out", help="directory for fig6_cdf.csv")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("run", help="run traversal experiments")
    _add_generator_flags(p)
    p.add_argument("--graph", help="binary graph path (instead of a generator)")
    p.add_argument("--algo", choices=["bfs", "sssp", "cc", "pr"], default="bfs")
    p.add_argument("--strategy",
                   choices=["naive", "merged", "merged-aligned", "all"],
                   default="all")
    p.add_argument("--sources", type=int, default=64)
    p.add_argument("--source-seed", type=int, default=DEFAULT_SOURCE_SEED)
    p.add_argument("--weight-seed", type=int, default=DEFAULT_WEIGHT_SEED)
    p.add_argument("--rtt-us", type=float, default=1.0)
    p.add_argument("--tags", type=int, default=256)
    p.add_argument("--header-bytes", type=int, default=18)
    p.add_argument("--peak-gibs", type=float, default=12.3)
    p.add_argument("--uvm-capacity-bytes", type=int, default=None)
    p.add_argument("--page-bytes", type=int, default=4096)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", help="directory for results.csv/summary.json/figures")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("micro", help="fixed warp patterns through the coalescer")
    p.add_argument("--json", action="store_true")
    return parser


def _generate(args) -> tuple:
    if args.generator == "uniform":
        g = generate_uniform(args.vertices, args.min_degree, args.max_degree,
                             args.seed, edge_elem_bytes=args.edge_bytes)
    elif args.generator == "powerlaw":
        g = generate_powerlaw(args.vertices, args.avg_degree, args.exponent,
                              args.seed, edge_elem_bytes=args.edge_bytes)
    else:
        raise SystemExit("choose --generator uniform|powerlaw")
    if args.undirected:
        g = symmetrized(g)
    return g


def _cmd_gen(args) -> int:
    g = _generate(args)
    if args.weights:
        g = with_uniform_weights(g, seed=args.weight_seed,
                                 weight_elem_bytes=args.weight_bytes)
    store_csr_binary(g, args.graph)
    info = {"path": args.graph, "num_vertices": g.num_vertices,
            "num_edges": g.num_edges, "weights": g.weights is not None}
    if args.json:
        print(json.dumps(info, sort_keys=True))
    else:
        print(f"wrote {args.graph}: {g.num_vertices} vertices, "
              f"{g.num_edges} edges")
    return 0


def _cmd_convert(args) -> int:
    g = load_edge_list_text(args.input, directed=not args.undirected,
                            num_vertices=args.vertices,
                            edge_elem_bytes=args.edge_bytes,
                            weight_elem_bytes=args.weight_bytes)
    store_csr_binary(g, args.graph)
    info = {"path": args.graph, "num_vertices": g.num_vertices,
            "num_edges": g.num_edges, "weights": g.weights is not None}
    if args.json:
        print(json.dumps(info, sort_keys=True))
    else:
        print(f"wrote {args.graph}: {g.num_vertices} vertices, "
              f"{g.num_edges} edges")
    return 0


def _load_or_generate(args):
    if args.graph:
        return load_csr_binary(args.graph, directed=not args.undirected)
    return _generate(args)


def _cmd_stats(args) -> int:
    g = _load_or_generate(args)
    degs = g.degrees
    info = {
        "num_vertices": g.num_vertices,
        "num_edges": g.num_edges,
        "mean_degree": float(degs.mean()) if g.num_vertices else 0.0,
        "min_degree": int(degs.min()) if g.num_vertices else 0,
        "max_degree": int(degs.max()) if g.num_vertices else 0,
        "edge_list_bytes": g.edge_list_bytes,
        "has_weights": g.weights is not None,
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "fig6_cdf.csv")
        with open(path, "w", newline="") as fh:
            fh.write("# emogi-sim v1\n")
            fh.write("degree,cumulative_edge_fraction\n")
            for d, f in degree_cdf(g).points:
                fh.write(f"{d},{f:.9g}\n")
        info["cdf_csv"] = path
    if args.json:
        print(json.dumps(info, sort_keys=True))
    else:
        for key in sorted(info):
            print(f"{key}: {info[key]}")
    return 0


def _cmd_run(args) -> int:
    strategies = (("naive", "merged", "merged-aligned")
                  if args.strategy == "all" else (args.strategy,))
    link = LinkModel(header_bytes=args.header_bytes, tag_limit=args.tags,
                     rtt_seconds=args.rtt_us * 1e-6,
                     peak_bandwidth_bytes_per_sec=args.peak_gibs * GIB)
    cfg = ExperimentConfig(
        graph_path=args.graph, generator=args.generator,
        num_vertices=args.vertices, min_degree=args.min_degree,
        max_degree=args.max_degree, avg_degree=args.avg_degree,
        exponent=args.exponent, graph_seed=args.seed,
        undirected=args.undirected, algo=args.algo, strategies=strategies,
        edge_elem_bytes=args.edge_bytes, weight_elem_bytes=args.weight_bytes,
        link=link, page_bytes=args.page_bytes,
        uvm_capacity_bytes=args.uvm_capacity_bytes,
        num_sources=args.sources, source_seed=args.source_seed,
        weight_seed=args.weight_seed, damping=args.damping,
        max_iters=args.max_iters, tol=args.tol, out_dir=args.out)
    rows, summary = run_experiment(cfg)
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        print(f"graph {summary['graph']}  algo {summary['algo']}  "
              f"dataset {summary['dataset_bytes']} bytes")
        for name in strategies:
            s = summary["per_strategy"][name]
            print(f"  {name:14s} requests={s['requests_total']:>12d} "
                  f"pct128={s['pct_128']:6.2f} "
                  f"amp={s['zc_amplification_mean']:.3f} "
                  f"uvm_amp={s['uvm_amplification_mean']:.3f} "
                  f"est={s['est_seconds_mean']:.6g}s")
        if args.out:
            print(f"wrote {args.out}/results.csv and figure CSVs")
    return 0


def _micro_patterns() -> dict[str, WarpAccess]:
    lanes = range(WARP_LANES)
    full = (True,) * WARP_LANES
    return {
        "strided": WarpAccess(tuple(i * 128 for i in lanes), full,
                              REGION_EDGES, 4),
        "merged_aligned": WarpAccess(tuple(i * 4 for i in lanes), full,
                                     REGION_EDGES, 4),
        "misaligned_32": WarpAccess(tuple(32 + i * 4 for i in lanes), full,
                                    REGION_EDGES, 4),
    }


def _cmd_micro(args) -> int:
    out = {}
    for name, wa in _micro_patterns().items():
        stats = coalesce_trace([wa])
        out[name] = {"requests_total": stats.request_count,
                     "hist": {str(k): v for k, v in sorted(stats.hist.items())}}
    if args.json:
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        for name, entry in out.items():
            hist = entry["hist"]
            parts = " ".join(f"{k}B={hist[k]}" for k in ("32", "64", "96", "128"))
            print(f"{name}: requests={entry['requests_total']} {parts}")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_config(argv)
    args = _build_parser().parse_args(argv)
    handlers = {"gen": _cmd_gen, "convert": _cmd_convert, "stats": _cmd_stats,
                "run": _cmd_run, "micro": _cmd_micro}
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
