"""Sector/line coalescing of warp accesses into interconnect read requests.

Each warp access touches a set of 32-byte sectors. Within every 128-byte
line, each maximal run of touched sectors becomes one read request, so
request sizes are 32, 64, 96, or 128 bytes. There is no cache model: every
touched sector is fetched again by the access that touches it, and only
lanes of the same access merge.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .access import (REGION_EDGES, REGION_WEIGHTS, AccessStrategy, WarpAccess,
                     _segmented_arange, naive_element_stream, step_element_windows)
from .csr import CsrGraph

SECTOR_BYTES = 32
LINE_BYTES = 128
_SECTORS_PER_LINE = LINE_BYTES // SECTOR_BYTES
_REGION_PAGE_BIT = 1 << 40  # keeps edge and weight page ids disjoint


@dataclass(frozen=True)
class MemoryRequest:
    """One interconnect read: sector-aligned, never crossing a 128-byte line."""

    base_addr: int
    size_bytes: int
    region: str = REGION_EDGES

    def __post_init__(self) -> None:
        if self.base_addr % SECTOR_BYTES:
            raise ValueError(f"base_addr {self.base_addr} not sector aligned")
        if self.size_bytes not in (32, 64, 96, 128):
            raise ValueError(f"size_bytes must be one of 32/64/96/128, got {self.size_bytes}")
        if self.base_addr // LINE_BYTES != (self.base_addr + self.size_bytes - 1) // LINE_BYTES:
            raise ValueError("request crosses a 128-byte line")


@dataclass
class TrafficStats:
    """Histogram of request sizes plus derived byte counts for one trace."""

    hist: dict[int, int]
    request_count: int
    payload_bytes: int
    dram_bytes: int
    amplification: float = 0.0

    @classmethod
    def zero(cls) -> "TrafficStats":
        return cls({32: 0, 64: 0, 96: 0, 128: 0}, 0, 0, 0)

    @classmethod
    def from_size_counts(cls, counts_by_sectors: Sequence[int]) -> "TrafficStats":
        """counts_by_sectors[i] = number of requests spanning i+1 sectors."""
        hist = {32 * (i + 1): int(c) for i, c in enumerate(counts_by_sectors)}
        for size in (32, 64, 96, 128):
            hist.setdefault(size, 0)
        request_count = sum(hist.values())
        payload = sum(size * n for size, n in hist.items())
        # Host DRAM serves 64-byte bursts: sub-64B requests still move 64B.
        dram = 64 * (hist[32] + hist[64]) + 128 * (hist[96] + hist[128])
        return cls(hist, request_count, payload, dram)

    def merged_with(self, other: "TrafficStats") -> "TrafficStats":
        hist = {size: self.hist.get(size, 0) + other.hist.get(size, 0)
                for size in (32, 64, 96, 128)}
        return TrafficStats(hist, self.request_count + other.request_count,
                            self.payload_bytes + other.payload_bytes,
                            self.dram_bytes + other.dram_bytes)

    def fraction(self, size: int) -> float:
        return self.hist.get(size, 0) / self.request_count if self.request_count else 0.0

    @property
    def mean_request_bytes(self) -> float:
        return self.payload_bytes / self.request_count if self.request_count else 0.0

    def with_amplification(self, dataset_bytes: int) -> "TrafficStats":
        return replace(self, amplification=self.payload_bytes / dataset_bytes)


def coalesce(wa: WarpAccess) -> list[MemoryRequest]:
    """Requests for one warp access, ordered by base address."""
    sectors: set[int] = set()
    for addr in wa.active_addresses():
        sectors.add(addr // SECTOR_BYTES)
        sectors.add((addr + wa.elem_bytes - 1) // SECTOR_BYTES)
    out: list[MemoryRequest] = []
    run_start = prev = None
    for sec in sorted(sectors):
        if run_start is None:
            run_start = prev = sec
            continue
        same_line = sec // _SECTORS_PER_LINE == run_start // _SECTORS_PER_LINE
        if sec == prev + 1 and same_line:
            prev = sec
            continue
        out.append(MemoryRequest(run_start * SECTOR_BYTES,
                                 (prev - run_start + 1) * SECTOR_BYTES, wa.region))
        run_start = prev = sec
    if run_start is not None:
        out.append(MemoryRequest(run_start * SECTOR_BYTES,
                                 (prev - run_start + 1) * SECTOR_BYTES, wa.region))
    return out


def coalesce_trace(trace: Iterable[WarpAccess]) -> TrafficStats:
    """Accumulate request statistics over a whole trace, access by access."""
    counts = [0, 0, 0, 0]
    for wa in trace:
        for req in coalesce(wa):
            counts[req.size_bytes // SECTOR_BYTES - 1] += 1
    return TrafficStats.from_size_counts(counts)


def _stream_stats(slot: np.ndarray, sector: np.ndarray, region_bit: np.ndarray,
                  want_pages: bool, page_bytes: int
                  ) -> tuple[TrafficStats, Optional[np.ndarray]]:
    """Coalesce a (access slot, touched sector) stream already sorted by slot
    with ascending sectors inside each slot."""
    if slot.size == 0:
        return TrafficStats.zero(), (np.zeros(0, dtype=np.int64) if want_pages else None)
    keep = np.ones(slot.size, dtype=bool)
    keep[1:] = (slot[1:] != slot[:-1]) | (sector[1:] != sector[:-1])
    slot, sector, region_bit = slot[keep], sector[keep], region_bit[keep]

    starts = np.ones(slot.size, dtype=bool)
    starts[1:] = ((slot[1:] != slot[:-1])
                  | (sector[1:] // _SECTORS_PER_LINE != sector[:-1] // _SECTORS_PER_LINE)
                  | (sector[1:] != sector[:-1] + 1))
    start_idx = np.flatnonzero(starts)
    run_len = np.diff(np.append(start_idx, slot.size))
    stats = TrafficStats.from_size_counts(np.bincount(run_len, minlength=5)[1:5])

    pages = None
    if want_pages:
        page_sectors = page_bytes // SECTOR_BYTES
        pages = (region_bit[start_idx] * _REGION_PAGE_BIT
                 + sector[start_idx] // page_sectors)
    return stats, pages


def _interleave(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty(a.size + b.size, dtype=np.int64)
    out[0::2] = a
    out[1::2] = b
    return out


def _expand_windows(lo: np.ndarray, hi: np.ndarray, elem_bytes: int
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Per window, the contiguous touched-sector interval, expanded."""
    first = (lo * elem_bytes) // SECTOR_BYTES
    last = (hi * elem_bytes - 1) // SECTOR_BYTES
    rep, j = _segmented_arange(last - first + 1)
    return rep, first[rep] + j


def frontier_traffic(g: CsrGraph, active, strategy: AccessStrategy,
                     include_weights: bool = False, want_pages: bool = False,
                     page_bytes: int = 4096
                     ) -> tuple[TrafficStats, Optional[np.ndarray]]:
    """Vectorized equivalent of coalesce_trace(trace_frontier(...)).

    Returns the traffic statistics and, when want_pages, the ordered page
    reference keys of every request (consecutive duplicates included once
    per request, edge and weight pages disjoint by a high region bit).
    """
    if include_weights and g.weights is None:
        raise ValueError("graph has no weights to trace")
    eb, wb = g.edge_elem_bytes, g.weight_elem_bytes

    if strategy is AccessStrategy.NAIVE:
        acc, elem = naive_element_stream(g, active)
        if include_weights:
            slot = _interleave(2 * acc, 2 * acc + 1)
            sector = _interleave((elem * eb) // SECTOR_BYTES, (elem * wb) // SECTOR_BYTES)
            region = np.zeros(slot.size, dtype=np.int64)
            region[1::2] = 1
            order = np.lexsort((sector, slot))
            slot, sector, region = slot[order], sector[order], region[order]
        else:
            slot = acc
            sector = (elem * eb) // SECTOR_BYTES
            region = np.zeros(slot.size, dtype=np.int64)
        return _stream_stats(slot, sector, region, want_pages, page_bytes)

    lo, hi = step_element_windows(g, active, strategy)
    if include_weights:
        rep_e, sec_e = _expand_windows(lo, hi, eb)
        rep_w, sec_w = _expand_windows(lo, hi, wb)
        slot = np.concatenate((2 * rep_e, 2 * rep_w + 1))
        sector = np.concatenate((sec_e, sec_w))
        region = np.concatenate((np.zeros(rep_e.size, dtype=np.int64),
                                 np.ones(rep_w.size, dtype=np.int64)))
        order = np.lexsort((sector, slot))
        slot, sector, region = slot[order], sector[order], region[order]
    else:
        slot, sector = _expand_windows(lo, hi, eb)
        region = np.zeros(slot.size, dtype=np.int64)
    return _stream_stats(slot, sector, region, want_pages, page_bytes)
