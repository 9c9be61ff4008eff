"""Level-synchronous vertex-centric BFS, SSSP, CC, and PageRank drivers.

Each driver keeps a per-vertex status array, processes the active frontier
once per iteration, and records the interconnect traffic that frontier's
neighbor-list reads would generate under the chosen access strategy. The
strategy changes traffic only; result arrays are identical across
strategies. Vertex/status arrays themselves live device-side and are free.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .access import AccessStrategy, _segmented_arange
from .coalesce import TrafficStats, frontier_traffic
from .csr import CsrGraph

UNREACHED_LEVEL = -1
UNREACHED_DIST = np.iinfo(np.int64).max


@dataclass
class TraversalResult:
    algo: str
    values: np.ndarray
    iterations: int
    per_iteration_traffic: list[TrafficStats]
    traversed_edges: list[int]
    flags: tuple[str, ...] = ()
    page_streams: Optional[list[np.ndarray]] = None

    @property
    def total_traffic(self) -> TrafficStats:
        total = TrafficStats.zero()
        for stats in self.per_iteration_traffic:
            total = total.merged_with(stats)
        return total

    @property
    def total_traversed_edges(self) -> int:
        return sum(self.traversed_edges)


class _TrafficLog:
    """Per-iteration traffic/page accounting shared by all drivers."""

    def __init__(self, g: CsrGraph, strategy: AccessStrategy, include_weights: bool,
                 collect: bool, want_pages: bool, page_bytes: int):
        self.g = g
        self.strategy = strategy
        self.include_weights = include_weights
        self.collect = collect or want_pages
        self.want_pages = want_pages
        self.page_bytes = page_bytes
        self.stats: list[TrafficStats] = []
        self.edges: list[int] = []
        self.pages: Optional[list[np.ndarray]] = [] if want_pages else None

    def record(self, frontier: np.ndarray) -> None:
        degs = self.g.offsets[frontier + 1] - self.g.offsets[frontier]
        self.edges.append(int(degs.sum()))
        if not self.collect:
            self.stats.append(TrafficStats.zero())
            return
        stats, pages = frontier_traffic(self.g, frontier, self.strategy,
                                        include_weights=self.include_weights,
                                        want_pages=self.want_pages,
                                        page_bytes=self.page_bytes)
        self.stats.append(stats)
        if self.pages is not None:
            self.pages.append(pages)

    def result(self, algo: str, values: np.ndarray, iterations: int,
               flags: tuple[str, ...] = ()) -> TraversalResult:
        return TraversalResult(algo=algo, values=values, iterations=iterations,
                               per_iteration_traffic=self.stats,
                               traversed_edges=self.edges, flags=flags,
                               page_streams=self.pages)


def _frontier_edge_ids(g: CsrGraph, frontier: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(position into frontier, edge array index) for every frontier edge."""
    starts = g.offsets[frontier]
    degs = g.offsets[frontier + 1] - starts
    rep, k = _segmented_arange(degs)
    return rep, starts[rep] + k


def _check_source(g: CsrGraph, source: int) -> None:
    if not 0 <= source < g.num_vertices:
        raise ValueError(f"source {source} out of range for {g.num_vertices} vertices")


def bfs(g: CsrGraph, source: int, strategy: AccessStrategy = AccessStrategy.MERGED_ALIGNED,
        *, collect_traffic: bool = True, want_pages: bool = False,
        page_bytes: int = 4096) -> TraversalResult:
    """Unweighted hop distances from source; unreached vertices get -1.

    Runs one iteration per level, including the final level whose expansion
    finds nothing new, so iterations = max reached level + 1.
    """
    _check_source(g, source)
    log = _TrafficLog(g, strategy, False, collect_traffic, want_pages, page_bytes)
    level = np.full(g.num_vertices, UNREACHED_LEVEL, dtype=np.int64)
    level[source] = 0
    frontier = np.array([source], dtype=np.int64)
    iterations = 0
    while frontier.size:
        log.record(frontier)
        iterations += 1
        _, eidx = _frontier_edge_ids(g, frontier)
        nbrs = np.unique(g.edges[eidx])
        nxt = nbrs[level[nbrs] == UNREACHED_LEVEL]
        level[nxt] = iterations
        frontier = nxt
    return log.result("bfs", level, iterations)


def sssp(g: CsrGraph, source: int, strategy: AccessStrategy = AccessStrategy.MERGED_ALIGNED,
         *, collect_traffic: bool = True, want_pages: bool = False,
         page_bytes: int = 4096) -> TraversalResult:
    """Exact shortest distances by frontier-restricted relaxation.

    Every active vertex relaxes all its out-edges; any vertex whose tentative
    distance improves joins the next frontier. Non-negative integer weights
    make the fixpoint exact. Weight reads are traced alongside edge reads.
    """
    _check_source(g, source)
    if g.weights is None:
        raise ValueError("sssp requires edge weights")
    if g.num_edges and g.weights.min() < 0:
        raise ValueError("sssp requires non-negative weights")
    log = _TrafficLog(g, strategy, True, collect_traffic, want_pages, page_bytes)
    dist = np.full(g.num_vertices, UNREACHED_DIST, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    iterations = 0
    while frontier.size:
        log.record(frontier)
        iterations += 1
        rep, eidx = _frontier_edge_ids(g, frontier)
        dsts = g.edges[eidx]
        cand = dist[frontier][rep] + g.weights[eidx]
        old = dist.copy()
        np.minimum.at(dist, dsts, cand)
        frontier = np.flatnonzero(dist < old)
    return log.result("sssp", dist, iterations)


def cc(g: CsrGraph, strategy: AccessStrategy = AccessStrategy.MERGED_ALIGNED,
       *, collect_traffic: bool = True, want_pages: bool = False,
       page_bytes: int = 4096) -> TraversalResult:
    """Connected-component labels by minimum-label propagation.

    All vertices start active with label = own id; improvements reactivate.
    Two vertices end with the same label iff they are connected, which needs
    the graph to be undirected.
    """
    if g.directed:
        raise ValueError("connected components require an undirected graph "
                         "(load with directed=False or symmetrize first)")
    log = _TrafficLog(g, strategy, False, collect_traffic, want_pages, page_bytes)
    label = np.arange(g.num_vertices, dtype=np.int64)
    frontier = np.arange(g.num_vertices, dtype=np.int64)
    iterations = 0
    while frontier.size:
        log.record(frontier)
        iterations += 1
        rep, eidx = _frontier_edge_ids(g, frontier)
        dsts = g.edges[eidx]
        cand = label[frontier][rep]
        old = label.copy()
        np.minimum.at(label, dsts, cand)
        frontier = np.flatnonzero(label < old)
    return log.result("cc", label, iterations)


def _is_multigraph(g: CsrGraph) -> bool:
    if g.num_edges < 2:
        return False
    src = np.repeat(np.arange(g.num_vertices, dtype=np.int64), g.degrees)
    order = np.lexsort((g.edges, src))
    s, d = src[order], g.edges[order]
    return bool(np.any((s[1:] == s[:-1]) & (d[1:] == d[:-1])))


def pagerank(g: CsrGraph, strategy: AccessStrategy = AccessStrategy.MERGED_ALIGNED,
             damping: float = 0.85, max_iters: int = 100, tol: float = 1e-6,
             *, collect_traffic: bool = True, want_pages: bool = False,
             page_bytes: int = 4096) -> TraversalResult:
    """Synchronous push PageRank over the full edge list each iteration.

    rank'[d] = (1-damping)/V + damping * (sum over in-edges of rank[s]/out[s]
    plus the uniformly redistributed dangling mass). Stops when the L1 change
    drops below tol or after max_iters. Ranks are normalized to sum to 1.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must be in (0, 1)")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if g.num_vertices == 0:
        raise ValueError("pagerank needs at least one vertex")

    flags: tuple[str, ...] = ()
    if _is_multigraph(g):
        flags = ("multigraph",)
        warnings.warn("multigraph input: pagerank treats each duplicate edge as an edge",
                      stacklevel=2)

    log = _TrafficLog(g, strategy, False, collect_traffic, want_pages, page_bytes)
    nv = g.num_vertices
    out = g.degrees.astype(np.float64)
    src = np.repeat(np.arange(nv, dtype=np.int64), g.degrees)
    dangling = np.flatnonzero(out == 0)
    inv_out = np.zeros(nv, dtype=np.float64)
    nonzero = out > 0
    inv_out[nonzero] = 1.0 / out[nonzero]

    rank = np.full(nv, 1.0 / nv, dtype=np.float64)
    iterations = 0
    for _ in range(max_iters):
        iterations += 1
        pushed = np.bincount(g.edges, weights=rank[src] * inv_out[src], minlength=nv)
        dangling_mass = float(rank[dangling].sum())
        new_rank = (1.0 - damping) / nv + damping * (pushed + dangling_mass / nv)
        delta = float(np.abs(new_rank - rank).sum())
        rank = new_rank
        if delta < tol:
            break

    # Whole-edge-list traffic is identical every iteration; trace it once.
    full = np.arange(nv, dtype=np.int64)
    log.record(full)
    one_stats = log.stats[0]
    one_edges = log.edges[0]
    one_pages = log.pages[0] if log.pages is not None else None
    log.stats = [one_stats] * iterations
    log.edges = [one_edges] * iterations
    if log.pages is not None:
        log.pages = [one_pages] * iterations

    rank = rank / rank.sum()
    return log.result("pagerank", rank, iterations, flags)
