"""On-demand page-migration baseline with bounded device memory and LRU.

Replays an access trace at page granularity: the first touch of a
non-resident page is a fault that migrates the whole page; residency is
capped and evicts the least recently touched page. Amplification is bytes
migrated over the dataset's size, the figure of merit against fine-grained
zero-copy traffic.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .access import REGION_EDGES, WarpAccess

_REGION_PAGE_BIT = 1 << 40


@dataclass(frozen=True)
class UvmConfig:
    page_bytes: int = 4096
    device_capacity_bytes: Optional[int] = None  # None = unbounded residency
    read_mostly: bool = True

    def __post_init__(self) -> None:
        if self.page_bytes <= 0 or self.page_bytes & (self.page_bytes - 1):
            raise ValueError("page_bytes must be a power of two")
        if self.device_capacity_bytes is not None and self.device_capacity_bytes < self.page_bytes:
            raise ValueError("capacity must hold at least one page")

    @property
    def capacity_pages(self) -> Optional[int]:
        if self.device_capacity_bytes is None:
            return None
        return self.device_capacity_bytes // self.page_bytes


@dataclass
class UvmStats:
    faults: int
    pages_migrated: int
    pages_evicted: int
    bytes_migrated: int
    amplification: float


def _replay_keys(key_arrays: Iterable[np.ndarray], cfg: UvmConfig,
                 dataset_bytes: int) -> UvmStats:
    cap = cfg.capacity_pages
    resident: OrderedDict[int, None] = OrderedDict()
    faults = evicted = 0
    prev = None
    for arr in key_arrays:
        if arr.size > 1:  # repeat touches cannot change LRU state
            arr = arr[np.concatenate(([True], arr[1:] != arr[:-1]))]
        for key in arr.tolist():
            if key == prev:
                continue
            prev = key
            if key in resident:
                resident.move_to_end(key)
            else:
                faults += 1
                resident[key] = None
                if cap is not None and len(resident) > cap:
                    resident.popitem(last=False)
                    evicted += 1
    bytes_migrated = faults * cfg.page_bytes
    return UvmStats(faults=faults, pages_migrated=faults, pages_evicted=evicted,
                    bytes_migrated=bytes_migrated,
                    amplification=bytes_migrated / dataset_bytes if dataset_bytes else 0.0)


def replay_page_stream(page_keys, cfg: UvmConfig, dataset_bytes: int) -> UvmStats:
    """Replay precomputed page reference keys (for example the want_pages
    output of frontier_traffic): one flat sequence or a list of arrays."""
    if isinstance(page_keys, np.ndarray):
        arrays = [page_keys]
    else:
        items = list(page_keys)
        if items and isinstance(items[0], np.ndarray):
            arrays = items
        else:
            arrays = [np.asarray(items, dtype=np.int64)]
    return _replay_keys(arrays, cfg, dataset_bytes)


def uvm_replay(trace: Iterable[WarpAccess], cfg: UvmConfig, dataset_bytes: int) -> UvmStats:
    """Replay a warp-access trace: touched pages per access in lane order."""
    def keys() -> Iterable[np.ndarray]:
        for wa in trace:
            refs = []
            for addr in wa.active_addresses():
                region_bit = 0 if wa.region == REGION_EDGES else 1
                first = addr // cfg.page_bytes
                last = (addr + wa.elem_bytes - 1) // cfg.page_bytes
                refs.append(region_bit * _REGION_PAGE_BIT + first)
                if last != first:
                    refs.append(region_bit * _REGION_PAGE_BIT + last)
            yield np.asarray(refs, dtype=np.int64)
    return _replay_keys(keys(), cfg, dataset_bytes)
