"""Experiment orchestration and figure-data emission.

Runs (algorithm, strategy, source) combinations over a loaded or generated
graph, aggregates per-run traffic, prices it with the link model, replays
the same trace through the page-migration baseline, and writes one CSV row
per run plus a JSON summary and per-figure CSV files. All outputs are
deterministic for fixed seeds.
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .access import AccessStrategy
from .coalesce import TrafficStats
from .csr import (DEFAULT_GRAPH_SEED, DEFAULT_SOURCE_SEED, DEFAULT_WEIGHT_SEED,
                  CsrGraph, degree_cdf, generate_powerlaw, generate_uniform,
                  load_csr_binary, pick_sources, symmetrized, with_uniform_weights)
from .link import GIB, LinkModel, estimate_transfer
from .traversal import TraversalResult, bfs, cc, pagerank, sssp
from .uvm import UvmConfig, replay_page_stream

CSV_SCHEMA_LINE = "# emogi-sim v1"

_STRATEGIES = {
    "naive": AccessStrategy.NAIVE,
    "merged": AccessStrategy.MERGED,
    "merged-aligned": AccessStrategy.MERGED_ALIGNED,
}

_RESULT_COLUMNS = [
    "graph", "algo", "strategy", "source", "iterations", "traversed_edges",
    "requests_total", "h32", "h64", "h96", "h128", "payload_bytes", "dram_bytes",
    "zc_amplification", "mean_request_bytes", "payload_efficiency",
    "efficiency_bound_gibs", "latency_bound_gibs", "effective_gibs",
    "est_seconds", "teps", "uvm_faults", "uvm_pages_evicted",
    "uvm_bytes_migrated", "uvm_amplification", "levels_checksum",
]


@dataclass
class ExperimentConfig:
    graph_path: Optional[str] = None
    generator: Optional[str] = None  # "uniform" or "powerlaw"
    num_vertices: int = 100_000
    min_degree: int = 16
    max_degree: int = 48
    avg_degree: float = 71.0
    exponent: float = 2.0
    graph_seed: int = DEFAULT_GRAPH_SEED
    undirected: bool = False
    algo: str = "bfs"
    strategies: tuple[str, ...] = ("naive", "merged", "merged-aligned")
    edge_elem_bytes: int = 4
    weight_elem_bytes: int = 4
    link: LinkModel = field(default_factory=LinkModel)
    page_bytes: int = 4096
    uvm_capacity_bytes: Optional[int] = None  # None: 25% of the dataset
    uvm_read_mostly: bool = True
    num_sources: int = 64
    source_seed: int = DEFAULT_SOURCE_SEED
    weight_seed: int = DEFAULT_WEIGHT_SEED
    damping: float = 0.85
    max_iters: int = 100
    tol: float = 1e-6
    out_dir: Optional[str] = None
    write_json: bool = True
    graph_label: Optional[str] = None


def resolve_graph(cfg: ExperimentConfig) -> tuple[CsrGraph, str]:
    """Load or generate the configured graph; attach weights if sssp needs them."""
    if cfg.graph_path:
        if not os.path.exists(cfg.graph_path):
            raise FileNotFoundError(cfg.graph_path)
        g = load_csr_binary(cfg.graph_path, directed=not cfg.undirected)
        label = cfg.graph_label or os.path.splitext(os.path.basename(cfg.graph_path))[0]
    elif cfg.generator == "uniform":
        g = generate_uniform(cfg.num_vertices, cfg.min_degree, cfg.max_degree,
                             cfg.graph_seed, edge_elem_bytes=cfg.edge_elem_bytes)
        label = cfg.graph_label or (f"uniform{cfg.min_degree}-{cfg.max_degree}"
                                    f"-v{cfg.num_vertices}-s{cfg.graph_seed}")
        if cfg.undirected:
            g = symmetrized(g)
    elif cfg.generator == "powerlaw":
        g = generate_powerlaw(cfg.num_vertices, cfg.avg_degree, cfg.exponent,
                              cfg.graph_seed, edge_elem_bytes=cfg.edge_elem_bytes)
        label = cfg.graph_label or (f"powerlaw{cfg.avg_degree:g}-e{cfg.exponent:g}"
                                    f"-v{cfg.num_vertices}-s{cfg.graph_seed}")
        if cfg.undirected:
            g = symmetrized(g)
    else:
        raise ValueError("config needs graph_path or generator uniform|powerlaw")
    if cfg.algo == "sssp" and g.weights is None:
        g = with_uniform_weights(g, seed=cfg.weight_seed,
                                 weight_elem_bytes=cfg.weight_elem_bytes)
    return g, label


def _dataset_bytes(g: CsrGraph, algo: str) -> int:
    n = g.edge_list_bytes
    if algo == "sssp":
        n += g.num_edges * g.weight_elem_bytes
    return n


def _checksum(values: np.ndarray) -> str:
    return f"{zlib.crc32(values.tobytes()):08x}"


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _run_one(g: CsrGraph, algo: str, strategy: AccessStrategy, source: int,
             cfg: ExperimentConfig) -> TraversalResult:
    if algo == "bfs":
        return bfs(g, source, strategy, want_pages=True, page_bytes=cfg.page_bytes)
    if algo == "sssp":
        return sssp(g, source, strategy, want_pages=True, page_bytes=cfg.page_bytes)
    if algo == "cc":
        return cc(g, strategy, want_pages=True, page_bytes=cfg.page_bytes)
    if algo == "pr":
        return pagerank(g, strategy, cfg.damping, cfg.max_iters, cfg.tol,
                        want_pages=True, page_bytes=cfg.page_bytes)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_experiment(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Execute the configured runs; write CSV/JSON/figure files when out_dir set.

    Returns (rows, summary). Per-source rows exist for bfs/sssp (sources come
    from pick_sources, which already excludes zero-out-degree vertices); cc
    and pr are single runs with source = -1.
    """
    if cfg.algo not in ("bfs", "sssp", "cc", "pr"):
        raise ValueError(f"unknown algorithm {cfg.algo!r}")
    for name in cfg.strategies:
        if name not in _STRATEGIES:
            raise ValueError(f"unknown strategy {name!r}")
    g, label = resolve_graph(cfg)
    dataset = _dataset_bytes(g, cfg.algo)
    capacity = cfg.uvm_capacity_bytes
    if capacity is None:
        capacity = max(cfg.page_bytes, dataset // 4)
    uvm_cfg = UvmConfig(page_bytes=cfg.page_bytes, device_capacity_bytes=capacity,
                        read_mostly=cfg.uvm_read_mostly)

    if cfg.algo in ("bfs", "sssp"):
        sources = [int(s) for s in pick_sources(g, cfg.num_sources, cfg.source_seed)]
    else:
        sources = [-1]

    rows: list[dict] = []
    for name in cfg.strategies:
        strategy = _STRATEGIES[name]
        for source in sources:
            res = _run_one(g, cfg.algo, strategy, source, cfg)
            total = res.total_traffic.with_amplification(dataset)
            est = estimate_transfer(total, cfg.link)
            uvm = replay_page_stream(res.page_streams, uvm_cfg, dataset)
            rows.append({
                "graph": label,
                "algo": cfg.algo,
                "strategy": name,
                "source": source,
                "iterations": res.iterations,
                "traversed_edges": res.total_traversed_edges,
                "requests_total": total.request_count,
                "h32": total.hist[32], "h64": total.hist[64],
                "h96": total.hist[96], "h128": total.hist[128],
                "payload_bytes": total.payload_bytes,
                "dram_bytes": total.dram_bytes,
                "zc_amplification": total.amplification,
                "mean_request_bytes": total.mean_request_bytes,
                "payload_efficiency": est.payload_efficiency,
                "efficiency_bound_gibs": est.efficiency_bound_bytes_per_sec / GIB,
                "latency_bound_gibs": est.latency_bound_bytes_per_sec / GIB,
                "effective_gibs": est.effective_bandwidth_gibs,
                "est_seconds": est.est_seconds,
                "teps": res.total_traversed_edges / est.est_seconds,
                "uvm_faults": uvm.faults,
                "uvm_pages_evicted": uvm.pages_evicted,
                "uvm_bytes_migrated": uvm.bytes_migrated,
                "uvm_amplification": uvm.amplification,
                "levels_checksum": _checksum(res.values),
            })
    rows.sort(key=lambda r: (r["graph"], r["algo"], r["strategy"], r["source"]))
    summary = _summarize(rows, label, cfg, dataset)

    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        _write_rows_csv(rows, os.path.join(cfg.out_dir, "results.csv"))
        if cfg.write_json:
            with open(os.path.join(cfg.out_dir, "summary.json"), "w") as fh:
                json.dump(summary, fh, indent=2, sort_keys=True)
                fh.write("\n")
        emit_figure_data(rows, cfg.out_dir, graph=g, link=cfg.link)
    return rows, summary


def _write_rows_csv(rows: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(CSV_SCHEMA_LINE + "\n")
        fh.write(",".join(_RESULT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in _RESULT_COLUMNS) + "\n")


def _aggregate_by_strategy(rows: list[dict]) -> dict[str, dict]:
    agg: dict[str, dict] = {}
    for row in rows:
        a = agg.setdefault(row["strategy"], {
            "hist": {32: 0, 64: 0, 96: 0, 128: 0}, "requests_total": 0,
            "payload_bytes": 0, "dram_bytes": 0, "runs": 0,
            "est_seconds_sum": 0.0, "teps_sum": 0.0,
            "zc_amplification_sum": 0.0, "uvm_amplification_sum": 0.0,
            "traversed_edges": 0,
        })
        for size in (32, 64, 96, 128):
            a["hist"][size] += row[f"h{size}"]
        a["requests_total"] += row["requests_total"]
        a["payload_bytes"] += row["payload_bytes"]
        a["dram_bytes"] += row["dram_bytes"]
        a["runs"] += 1
        a["est_seconds_sum"] += row["est_seconds"]
        a["teps_sum"] += row["teps"]
        a["zc_amplification_sum"] += row["zc_amplification"]
        a["uvm_amplification_sum"] += row["uvm_amplification"]
        a["traversed_edges"] += row["traversed_edges"]
    return agg


def _summarize(rows: list[dict], label: str, cfg: ExperimentConfig,
               dataset_bytes: int) -> dict:
    agg = _aggregate_by_strategy(rows)
    per_strategy = {}
    for name, a in agg.items():
        n = a["requests_total"]
        per_strategy[name] = {
            "requests_total": n,
            "hist": {str(k): v for k, v in a["hist"].items()},
            "pct_128": 100.0 * a["hist"][128] / n if n else 0.0,
            "payload_bytes": a["payload_bytes"],
            "zc_amplification_mean": a["zc_amplification_sum"] / a["runs"],
            "uvm_amplification_mean": a["uvm_amplification_sum"] / a["runs"],
            "est_seconds_mean": a["est_seconds_sum"] / a["runs"],
            "teps_mean": a["teps_sum"] / a["runs"],
        }
    summary = {
        "schema": CSV_SCHEMA_LINE.lstrip("# "),
        "graph": label,
        "algo": cfg.algo,
        "dataset_bytes": dataset_bytes,
        "runs_per_strategy": len(rows) // max(len(agg), 1),
        "per_strategy": per_strategy,
    }
    if "naive" in agg and "merged" in agg and agg["merged"]["requests_total"]:
        summary["naive_over_merged_requests"] = (
            agg["naive"]["requests_total"] / agg["merged"]["requests_total"])
    if "merged" in agg and "merged-aligned" in agg:
        summary["aligned_gain_pct128"] = (per_strategy["merged-aligned"]["pct_128"]
                                          - per_strategy["merged"]["pct_128"])
    return summary


def emit_figure_data(rows: list[dict], out_dir: str, graph: Optional[CsrGraph] = None,
                     link: Optional[LinkModel] = None) -> dict[str, str]:
    """Write the per-figure CSV analogs; returns {figure name: path}."""
    os.makedirs(out_dir, exist_ok=True)
    link = link or LinkModel()
    groups: dict[tuple[str, str], dict[str, dict]] = {}
    for key in sorted({(r["graph"], r["algo"]) for r in rows}):
        members = [r for r in rows if (r["graph"], r["algo"]) == key]
        groups[key] = _aggregate_by_strategy(members)
    paths: dict[str, str] = {}

    def _open(name: str):
        path = os.path.join(out_dir, name)
        paths[name.split("_")[0]] = path
        fh = open(path, "w", newline="")
        fh.write(CSV_SCHEMA_LINE + "\n")
        return fh

    with _open("fig5_hist.csv") as fh:
        fh.write("graph,algo,strategy,pct_32,pct_64,pct_96,pct_128,requests_total\n")
        for (graph_label, algo), agg in groups.items():
            for name in sorted(agg):
                a = agg[name]
                n = a["requests_total"]
                pcts = [100.0 * a["hist"][s] / n if n else 0.0 for s in (32, 64, 96, 128)]
                fh.write(f"{graph_label},{algo},{name},"
                         + ",".join(f"{p:.6f}" for p in pcts) + f",{n}\n")

    if graph is not None:
        with _open("fig6_cdf.csv") as fh:
            fh.write("degree,cumulative_edge_fraction\n")
            cdf = degree_cdf(graph)
            for d, f in cdf.points:
                fh.write(f"{d},{f:.9g}\n")

    with _open("fig7_counts.csv") as fh:
        fh.write("graph,algo,strategy,requests_total\n")
        for (graph_label, algo), agg in groups.items():
            for name in sorted(agg):
                fh.write(f"{graph_label},{algo},{name},{agg[name]['requests_total']}\n")

    with _open("fig8_bandwidth.csv") as fh:
        fh.write("graph,algo,strategy,mean_request_bytes,payload_efficiency,"
                 "efficiency_bound_gibs,latency_bound_gibs,effective_gibs\n")
        for (graph_label, algo), agg in groups.items():
            for name in sorted(agg):
                a = agg[name]
                stats = TrafficStats.from_size_counts(
                    [a["hist"][32], a["hist"][64], a["hist"][96], a["hist"][128]])
                if stats.request_count == 0:
                    continue
                est = estimate_transfer(stats, link)
                fh.write(f"{graph_label},{algo},{name},{_fmt(est.mean_request_bytes)},"
                         f"{_fmt(est.payload_efficiency)},"
                         f"{_fmt(est.efficiency_bound_bytes_per_sec / GIB)},"
                         f"{_fmt(est.latency_bound_bytes_per_sec / GIB)},"
                         f"{_fmt(est.effective_bandwidth_bytes_per_sec / GIB)}\n")

    with _open("fig10_amp.csv") as fh:
        fh.write("graph,algo,strategy,zerocopy_amplification,uvm_amplification,"
                 "uvm_over_zerocopy\n")
        for (graph_label, algo), agg in groups.items():
            for name in sorted(agg):
                a = agg[name]
                zc = a["zc_amplification_sum"] / a["runs"]
                uv = a["uvm_amplification_sum"] / a["runs"]
                ratio = uv / zc if zc else 0.0
                fh.write(f"{graph_label},{algo},{name},{_fmt(zc)},{_fmt(uv)},"
                         f"{_fmt(ratio)}\n")
    return paths
