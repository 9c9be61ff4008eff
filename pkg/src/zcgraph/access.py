"""Warp-level access trace emission for the three list-traversal strategies.

A warp has 32 lockstep lanes. Naive assigns one thread per vertex, so a warp
carries 32 consecutive active vertices whose lanes scan their own lists in
lockstep. Merged assigns a whole warp to one vertex's list, 32 consecutive
elements per step. MergedAligned additionally floor-aligns the first step to
a 128-byte boundary and masks the lanes that would run off the front of the
list. Tracing is purely functional: it reports which addresses a kernel would
touch, never timing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .csr import CsrGraph

WARP_LANES = 32

REGION_EDGES = "edges"
REGION_WEIGHTS = "weights"


class AccessStrategy(Enum):
    NAIVE = "naive"
    MERGED = "merged"
    MERGED_ALIGNED = "merged-aligned"


def _aligned_start(start_elem: int, elem_bytes: int) -> int:
    # Floor the element index so its byte address lands on a 128-byte line.
    mask = 0xF if elem_bytes == 8 else 0x1F
    return start_elem & ~mask


@dataclass(frozen=True)
class WarpAccess:
    """One warp memory instruction: 32 lane addresses plus an active mask."""

    lane_addresses: tuple[int, ...]
    active_mask: tuple[bool, ...]
    region: str
    elem_bytes: int = 4

    def __post_init__(self) -> None:
        if len(self.lane_addresses) != WARP_LANES or len(self.active_mask) != WARP_LANES:
            raise ValueError("lane_addresses and active_mask must have 32 entries")
        if not any(self.active_mask):
            raise ValueError("at least one lane must be active")
        if self.elem_bytes not in (4, 8):
            raise ValueError("elem_bytes must be 4 or 8")
        for addr, on in zip(self.lane_addresses, self.active_mask):
            if on and addr % self.elem_bytes:
                raise ValueError(f"active address {addr} not aligned to {self.elem_bytes}B element")

    def active_addresses(self) -> list[int]:
        return [a for a, on in zip(self.lane_addresses, self.active_mask) if on]


def _lane_access(elems: Sequence[int], active: Sequence[bool], elem_bytes: int,
                 base_addr: int, region: str) -> WarpAccess:
    addrs = tuple(base_addr + elem_bytes * e if on else 0 for e, on in zip(elems, active))
    return WarpAccess(addrs, tuple(bool(b) for b in active), region, elem_bytes)


def emit_list_accesses(strategy: AccessStrategy, list_start_elem: int, list_end_elem: int,
                       elem_bytes: int, region_base_addr: int,
                       region: str = REGION_EDGES) -> list[WarpAccess]:
    """Warp accesses generated while one list [start, end) is traversed."""
    if list_start_elem > list_end_elem:
        raise ValueError("list_start_elem must not exceed list_end_elem")
    if elem_bytes not in (4, 8):
        raise ValueError("elem_bytes must be 4 or 8")
    if region_base_addr % 128:
        raise ValueError("region_base_addr must be a multiple of 128")

    out: list[WarpAccess] = []
    if list_start_elem == list_end_elem:
        return out
    if strategy is AccessStrategy.NAIVE:
        for e in range(list_start_elem, list_end_elem):
            out.append(_lane_access([e] + [0] * 31, [True] + [False] * 31,
                                    elem_bytes, region_base_addr, region))
        return out

    start = list_start_elem
    if strategy is AccessStrategy.MERGED_ALIGNED:
        start = _aligned_start(list_start_elem, elem_bytes)
    for base in range(start, list_end_elem, WARP_LANES):
        elems = [base + lane for lane in range(WARP_LANES)]
        active = [list_start_elem <= e < list_end_elem for e in elems]
        out.append(_lane_access(elems, active, elem_bytes, region_base_addr, region))
    return out


def _mirror_to_weights(wa: WarpAccess, edge_elem_bytes: int, weight_elem_bytes: int,
                       weight_base_addr: int = 0) -> WarpAccess:
    # Same element indices, re-addressed at the weight region's element size.
    elems = [a // edge_elem_bytes if on else 0
             for a, on in zip(wa.lane_addresses, wa.active_mask)]
    return _lane_access(elems, wa.active_mask, weight_elem_bytes,
                        weight_base_addr, REGION_WEIGHTS)


def _normalized_frontier(g: CsrGraph, active) -> np.ndarray:
    if active is None:
        return np.arange(g.num_vertices, dtype=np.int64)
    arr = np.unique(np.asarray(active, dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= g.num_vertices):
        raise ValueError("active vertex out of range")
    return arr


def trace_frontier(g: CsrGraph, active, strategy: AccessStrategy,
                   include_weights: bool = False) -> list[WarpAccess]:
    """Full warp-access trace for one frontier, in ascending vertex order.

    Naive packs 32 consecutive active vertices per warp and advances their
    lists in lockstep; the other strategies give each vertex its own warp.
    With include_weights every edge-list access is followed by its mirrored
    weight-list access.
    """
    if include_weights and g.weights is None:
        raise ValueError("graph has no weights to trace")
    frontier = _normalized_frontier(g, active)
    eb = g.edge_elem_bytes
    wb = g.weight_elem_bytes
    offs = g.offsets
    trace: list[WarpAccess] = []

    def push(wa: WarpAccess) -> None:
        trace.append(wa)
        if include_weights:
            trace.append(_mirror_to_weights(wa, eb, wb))

    if strategy is not AccessStrategy.NAIVE:
        for v in frontier:
            for wa in emit_list_accesses(strategy, int(offs[v]), int(offs[v + 1]), eb, 0):
                push(wa)
        return trace

    for w0 in range(0, frontier.size, WARP_LANES):
        chunk = frontier[w0:w0 + WARP_LANES]
        starts = offs[chunk]
        degs = (offs[chunk + 1] - starts).astype(np.int64)
        for k in range(int(degs.max(initial=0))):
            elems = [int(starts[i]) + k if k < degs[i] else 0 for i in range(chunk.size)]
            activ = [k < degs[i] for i in range(chunk.size)]
            elems += [0] * (WARP_LANES - chunk.size)
            activ += [False] * (WARP_LANES - chunk.size)
            push(_lane_access(elems, activ, eb, 0, REGION_EDGES))
    return trace


def _segmented_arange(counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(segment index, position within segment) for each of sum(counts) slots."""
    total = int(counts.sum())
    if total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    rep = np.repeat(np.arange(counts.size, dtype=np.int64), counts)
    starts = np.concatenate(([0], np.cumsum(counts, dtype=np.int64)))
    k = np.arange(total, dtype=np.int64) - starts[rep]
    return rep, k


def step_element_windows(g: CsrGraph, active, strategy: AccessStrategy
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Merged/MergedAligned trace: per warp step, the half-open
    element window [lo, hi) its active lanes cover, in trace order."""
    if strategy is AccessStrategy.NAIVE:
        raise ValueError("naive traces have no contiguous step windows")
    frontier = _normalized_frontier(g, active)
    s = g.offsets[frontier]
    e = g.offsets[frontier + 1]
    nz = e > s
    s, e = s[nz], e[nz]
    if strategy is AccessStrategy.MERGED_ALIGNED:
        mask = 0xF if g.edge_elem_bytes == 8 else 0x1F
        a = s & ~mask
    else:
        a = s
    nsteps = (e - a + WARP_LANES - 1) // WARP_LANES
    rep, k = _segmented_arange(nsteps)
    base = a[rep] + WARP_LANES * k
    lo = np.maximum(base, s[rep])
    hi = np.minimum(base + WARP_LANES, e[rep])
    return lo, hi


def naive_element_stream(g: CsrGraph, active) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Naive trace: (warp-step id, element index) per active lane.

    Step ids are dense and ascending in trace order (warp-major, lockstep
    step minor); elements within one step appear in ascending lane order.
    """
    frontier = _normalized_frontier(g, active)
    if frontier.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    starts = g.offsets[frontier]
    degs = (g.offsets[frontier + 1] - starts).astype(np.int64)
    nwarps = (frontier.size + WARP_LANES - 1) // WARP_LANES
    warp_of = np.arange(frontier.size, dtype=np.int64) // WARP_LANES
    steps_per_warp = np.zeros(nwarps, dtype=np.int64)
    np.maximum.at(steps_per_warp, warp_of, degs)
    step_base = np.concatenate(([0], np.cumsum(steps_per_warp)))[:-1]
    rep, k = _segmented_arange(degs)
    acc = step_base[warp_of[rep]] + k
    elem = starts[rep] + k
    order = np.lexsort((elem, acc))
    return acc[order], elem[order]
