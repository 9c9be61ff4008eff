"""Analytic link model: per-request header overhead, an outstanding-tag
latency bound, and a min-of-bounds transfer-time estimator.

Every read carries a fixed header, so small requests waste a large share of
the wire. With a bounded number of in-flight reads, bandwidth is also capped
at request_bytes * tag_limit / round_trip_time. Reported bandwidths use
binary GiB (2^30 bytes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coalesce import TrafficStats

GIB = 1 << 30


@dataclass(frozen=True)
class LinkModel:
    header_bytes: int = 18
    tag_limit: int = 256
    rtt_seconds: float = 1.0e-6
    peak_bandwidth_bytes_per_sec: float = 12.3 * GIB

    def __post_init__(self) -> None:
        if self.header_bytes < 0:
            raise ValueError("header_bytes must be >= 0")
        if self.tag_limit < 1:
            raise ValueError("tag_limit must be >= 1")
        if self.rtt_seconds <= 0 or self.peak_bandwidth_bytes_per_sec <= 0:
            raise ValueError("rtt and peak bandwidth must be positive")


def tlp_overhead_ratio(payload_bytes: float, m: LinkModel = LinkModel()) -> float:
    """Fraction of wire bytes spent on the packet header."""
    if payload_bytes <= 0:
        raise ValueError("payload_bytes must be positive")
    return m.header_bytes / (m.header_bytes + payload_bytes)


def latency_bound_bandwidth(request_bytes: float, m: LinkModel = LinkModel()) -> float:
    """Best possible bytes/sec when tag_limit requests of this size are in flight."""
    if request_bytes <= 0:
        raise ValueError("request_bytes must be positive")
    return request_bytes * m.tag_limit / m.rtt_seconds


def tags_needed(target_bytes_per_sec: float, request_bytes: float,
                m: LinkModel = LinkModel()) -> int:
    """Smallest outstanding-request count that sustains the target bandwidth."""
    if target_bytes_per_sec <= 0 or request_bytes <= 0:
        raise ValueError("target bandwidth and request size must be positive")
    return math.ceil(target_bytes_per_sec * m.rtt_seconds / request_bytes)


@dataclass(frozen=True)
class TransferEstimate:
    effective_bandwidth_bytes_per_sec: float
    est_seconds: float
    payload_efficiency: float
    efficiency_bound_bytes_per_sec: float
    latency_bound_bytes_per_sec: float
    mean_request_bytes: float

    @property
    def effective_bandwidth_gibs(self) -> float:
        return self.effective_bandwidth_bytes_per_sec / GIB


def estimate_transfer(stats: TrafficStats, m: LinkModel = LinkModel()) -> TransferEstimate:
    """Static min-of-bounds estimate: the link is limited either by payload
    efficiency against its peak or by the in-flight cap at the traffic's
    mean request size, whichever is lower."""
    if stats.request_count == 0 or stats.payload_bytes == 0:
        raise ValueError("cannot estimate an empty transfer")
    efficiency = stats.payload_bytes / (stats.payload_bytes
                                        + m.header_bytes * stats.request_count)
    efficiency_bound = m.peak_bandwidth_bytes_per_sec * efficiency
    latency_bound = latency_bound_bandwidth(stats.mean_request_bytes, m)
    effective = min(efficiency_bound, latency_bound)
    return TransferEstimate(
        effective_bandwidth_bytes_per_sec=effective,
        est_seconds=stats.payload_bytes / effective,
        payload_efficiency=efficiency,
        efficiency_bound_bytes_per_sec=efficiency_bound,
        latency_bound_bytes_per_sec=latency_bound,
        mean_request_bytes=stats.mean_request_bytes,
    )
