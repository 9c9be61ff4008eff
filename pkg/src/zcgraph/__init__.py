"""Trace-driven simulator for warp-level access to host-resident CSR graphs.

Models how a 32-lane warp touches a graph's edge lists over a request/reply
interconnect: per-step request coalescing into 32..128-byte transactions,
header-overhead and latency bandwidth bounds, a page-migration baseline,
and level-synchronous BFS/SSSP/CC/PageRank drivers that produce the traffic.
"""

from .access import (REGION_EDGES, REGION_WEIGHTS, WARP_LANES, AccessStrategy,
                     WarpAccess, emit_list_accesses, trace_frontier)
from .coalesce import (LINE_BYTES, SECTOR_BYTES, MemoryRequest, TrafficStats,
                       coalesce, coalesce_trace, frontier_traffic)
from .csr import (CsrGraph, DegreeCdf, degree_cdf, generate_powerlaw,
                  generate_uniform, load_csr_binary, load_edge_list_text,
                  pick_sources, store_csr_binary, symmetrized, validate,
                  with_uniform_weights)
from .link import (GIB, LinkModel, TransferEstimate, estimate_transfer,
                   latency_bound_bandwidth, tags_needed, tlp_overhead_ratio)
from .report import ExperimentConfig, emit_figure_data, run_experiment
from .traversal import TraversalResult, bfs, cc, pagerank, sssp
from .uvm import UvmConfig, UvmStats, replay_page_stream, uvm_replay

__version__ = "0.1.0"

__all__ = [
    "AccessStrategy", "CsrGraph", "DegreeCdf", "ExperimentConfig", "GIB",
    "LINE_BYTES", "LinkModel", "MemoryRequest", "REGION_EDGES",
    "REGION_WEIGHTS", "SECTOR_BYTES", "TrafficStats", "TransferEstimate",
    "TraversalResult", "UvmConfig", "UvmStats", "WARP_LANES", "WarpAccess",
    "bfs", "cc", "coalesce", "coalesce_trace", "degree_cdf",
    "emit_figure_data", "emit_list_accesses", "estimate_transfer",
    "frontier_traffic", "generate_powerlaw", "generate_uniform",
    "latency_bound_bandwidth", "load_csr_binary", "load_edge_list_text",
    "pagerank", "pick_sources", "replay_page_stream", "run_experiment",
    "sssp", "store_csr_binary", "symmetrized", "tags_needed",
    "tlp_overhead_ratio", "trace_frontier", "uvm_replay", "validate",
    "with_uniform_weights",
]
