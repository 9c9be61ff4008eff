"""CSR graph container, text/binary IO, synthetic generators, degree statistics.

The graph is stored as an offsets array (one entry per vertex plus one) that
indexes a flat destination array, with optional integer edge weights. Element
byte widths (4 or 8) describe how the arrays would be laid out in a simulated
host buffer; in-memory arrays are always int64 for arithmetic convenience.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

MAGIC = b"EMGI"
FORMAT_VERSION = 1
_FLAG_WEIGHTS = 1 << 0
_FLAG_EDGE8 = 1 << 1
_FLAG_WEIGHT8 = 1 << 2
_HEADER = struct.Struct("<4sIIQQ")  # magic, version, flags, num_vertices, num_edges
_PAYLOAD_ALIGN = 128

DEFAULT_GRAPH_SEED = 3
DEFAULT_SOURCE_SEED = 7
DEFAULT_WEIGHT_SEED = 11


def _align_up(n: int, align: int) -> int:
    return (n + align - 1) // align * align


@dataclass(eq=False)
class CsrGraph:
    """Immutable-by-convention CSR graph."""

    num_vertices: int
    num_edges: int
    offsets: np.ndarray
    edges: np.ndarray
    weights: Optional[np.ndarray] = None
    edge_elem_bytes: int = 4
    weight_elem_bytes: int = 4
    directed: bool = True

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.edges[self.offsets[v]:self.offsets[v + 1]]

    @property
    def edge_list_bytes(self) -> int:
        return self.num_edges * self.edge_elem_bytes

    @property
    def weight_list_bytes(self) -> int:
        return self.num_edges * self.weight_elem_bytes if self.weights is not None else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CsrGraph):
            return NotImplemented
        if (self.num_vertices, self.num_edges, self.edge_elem_bytes,
                self.weight_elem_bytes) != (other.num_vertices, other.num_edges,
                                            other.edge_elem_bytes, other.weight_elem_bytes):
            return False
        if not (np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.edges, other.edges)):
            return False
        if (self.weights is None) != (other.weights is None):
            return False
        return self.weights is None or np.array_equal(self.weights, other.weights)


def validate(g: CsrGraph) -> None:
    """Raise ValueError if any structural invariant is violated."""
    if g.edge_elem_bytes not in (4, 8):
        raise ValueError(f"edge_elem_bytes must be 4 or 8, got {g.edge_elem_bytes}")
    if g.weight_elem_bytes not in (4, 8):
        raise ValueError(f"weight_elem_bytes must be 4 or 8, got {g.weight_elem_bytes}")
    if g.num_vertices < 0 or g.num_edges < 0:
        raise ValueError("negative graph dimensions")
    if g.offsets.shape != (g.num_vertices + 1,):
        raise ValueError(f"offsets must have {g.num_vertices + 1} entries, got {g.offsets.shape}")
    if g.num_vertices >= 0 and g.offsets[0] != 0:
        raise ValueError("offsets[0] must be 0")
    if g.offsets[-1] != g.num_edges:
        raise ValueError(f"offsets[-1]={g.offsets[-1]} does not match num_edges={g.num_edges}")
    if np.any(np.diff(g.offsets) < 0):
        raise ValueError("offsets must be non-decreasing")
    if g.edges.shape != (g.num_edges,):
        raise ValueError("edges length does not match num_edges")
    if g.num_edges and (g.edges.min() < 0 or g.edges.max() >= g.num_vertices):
        raise ValueError("edge destination out of range")
    if g.weights is not None and g.weights.shape != (g.num_edges,):
        raise ValueError("weights length does not match num_edges")
    if g.weights is not None and g.num_edges and g.weights.min() < 0:
        raise ValueError("weights must be non-negative")
    if g.edge_elem_bytes == 4 and g.num_vertices > 2 ** 32:
        raise ValueError("4-byte edge elements cannot address more than 2^32 vertices")


def _from_sorted_edges(num_vertices: int, src: np.ndarray, dst: np.ndarray,
                       weights: Optional[np.ndarray], edge_elem_bytes: int,
                       weight_elem_bytes: int, directed: bool) -> CsrGraph:
    # src must already be sorted; grouping is a bincount over sources.
    counts = np.bincount(src, minlength=num_vertices) if src.size else np.zeros(num_vertices, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts, dtype=np.int64)))
    g = CsrGraph(num_vertices=num_vertices, num_edges=int(src.size),
                 offsets=offsets, edges=dst.astype(np.int64, copy=False),
                 weights=None if weights is None else weights.astype(np.int64, copy=False),
                 edge_elem_bytes=edge_elem_bytes, weight_elem_bytes=weight_elem_bytes,
                 directed=directed)
    validate(g)
    return g


def load_edge_list_text(path: str, directed: bool = True, num_vertices: Optional[int] = None,
                        edge_elem_bytes: int = 4, weight_elem_bytes: int = 4) -> CsrGraph:
    """Parse a whitespace-separated "src dst [weight]" file into a CSR graph.

    Lines starting with '#' or '%' are ignored. With directed=False every edge
    is materialized in both directions and neighbor lists are ordered by
    destination; directed loads keep the file's edge order within each list.
    """
    srcs: list[int] = []
    dsts: list[int] = []
    wts: list[int] = []
    id_limit = 2 ** 32 if edge_elem_bytes == 4 else 2 ** 63
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line[0] in "#%":
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(f"line {lineno}: expected 'src dst [weight]', got {line!r}")
            try:
                s, d = int(parts[0]), int(parts[1])
                w = int(parts[2]) if len(parts) == 3 else None
            except ValueError:
                raise ValueError(f"line {lineno}: non-integer field in {line!r}") from None
            if s < 0 or d < 0:
                raise ValueError(f"line {lineno}: negative vertex id")
            if s >= id_limit or d >= id_limit:
                raise ValueError(
                    f"line {lineno}: vertex id {max(s, d)} exceeds "
                    f"{edge_elem_bytes}-byte edge datatype")
            if w is not None and w < 0:
                raise ValueError(f"line {lineno}: negative weight")
            if wts and w is None or (w is not None and srcs and not wts):
                raise ValueError(f"line {lineno}: inconsistent weight column")
            srcs.append(s)
            dsts.append(d)
            if w is not None:
                wts.append(w)

    src = np.asarray(srcs, dtype=np.int64)
    dst = np.asarray(dsts, dtype=np.int64)
    wgt = np.asarray(wts, dtype=np.int64) if wts else None
    max_id = int(max(src.max(initial=-1), dst.max(initial=-1)))
    nv = max(num_vertices or 0, max_id + 1)
    if not directed:
        src, dst = np.concatenate((src, dst)), np.concatenate((dst, src))
        if wgt is not None:
            wgt = np.concatenate((wgt, wgt))
        order = np.lexsort((dst, src))
    else:
        order = np.argsort(src, kind="stable")
    return _from_sorted_edges(nv, src[order], dst[order],
                              None if wgt is None else wgt[order],
                              edge_elem_bytes, weight_elem_bytes, directed)


def store_csr_binary(g: CsrGraph, path: str) -> None:
    """Write the little-endian binary layout; payload regions 128-byte aligned."""
    validate(g)
    flags = 0
    if g.weights is not None:
        flags |= _FLAG_WEIGHTS
    if g.edge_elem_bytes == 8:
        flags |= _FLAG_EDGE8
    if g.weight_elem_bytes == 8:
        flags |= _FLAG_WEIGHT8
    edge_dtype = "<u4" if g.edge_elem_bytes == 4 else "<u8"
    weight_dtype = "<u4" if g.weight_elem_bytes == 4 else "<u8"
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, flags, g.num_vertices, g.num_edges))
        fh.write(g.offsets.astype("<u8").tobytes())
        pos = _HEADER.size + (g.num_vertices + 1) * 8
        fh.write(b"\x00" * (_align_up(pos, _PAYLOAD_ALIGN) - pos))
        fh.write(g.edges.astype(edge_dtype).tobytes())
        if g.weights is not None:
            pos = _align_up(pos, _PAYLOAD_ALIGN) + g.num_edges * g.edge_elem_bytes
            fh.write(b"\x00" * (_align_up(pos, _PAYLOAD_ALIGN) - pos))
            fh.write(g.weights.astype(weight_dtype).tobytes())


def load_csr_binary(path: str, directed: bool = True) -> CsrGraph:
    """Read a binary CSR file; validates header, sizes, and invariants."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < _HEADER.size:
        raise ValueError(f"truncated file: {len(buf)} bytes, header needs {_HEADER.size}")
    magic, version, flags, nv, ne = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {version}")
    edge_elem_bytes = 8 if flags & _FLAG_EDGE8 else 4
    weight_elem_bytes = 8 if flags & _FLAG_WEIGHT8 else 4
    has_weights = bool(flags & _FLAG_WEIGHTS)

    pos = _HEADER.size
    end = pos + (nv + 1) * 8
    if len(buf) < end:
        raise ValueError("truncated file: offsets array incomplete")
    offsets = np.frombuffer(buf, dtype="<u8", count=nv + 1, offset=pos).astype(np.int64)

    pos = _align_up(end, _PAYLOAD_ALIGN)
    end = pos + ne * edge_elem_bytes
    if len(buf) < end:
        raise ValueError("truncated file: edge array incomplete")
    edge_dtype = "<u4" if edge_elem_bytes == 4 else "<u8"
    edges = np.frombuffer(buf, dtype=edge_dtype, count=ne, offset=pos).astype(np.int64)

    weights = None
    if has_weights:
        pos = _align_up(end, _PAYLOAD_ALIGN)
        end = pos + ne * weight_elem_bytes
        if len(buf) < end:
            raise ValueError("truncated file: weight array incomplete")
        weight_dtype = "<u4" if weight_elem_bytes == 4 else "<u8"
        weights = np.frombuffer(buf, dtype=weight_dtype, count=ne, offset=pos).astype(np.int64)

    g = CsrGraph(num_vertices=int(nv), num_edges=int(ne), offsets=offsets, edges=edges,
                 weights=weights, edge_elem_bytes=edge_elem_bytes,
                 weight_elem_bytes=weight_elem_bytes, directed=directed)
    validate(g)
    return g


def _sample_destinations(degrees: np.ndarray, num_vertices: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Uniform destinations with no duplicate within any one neighbor list."""
    total = int(degrees.sum())
    dst = rng.integers(0, num_vertices, total, dtype=np.int64)
    src = np.repeat(np.arange(degrees.size, dtype=np.int64), degrees)
    offsets = np.concatenate(([0], np.cumsum(degrees, dtype=np.int64)))
    # Long lists get a duplicate-free fill directly; rejection would crawl.
    for v in np.flatnonzero(degrees > max(8, num_vertices // 8)):
        d = int(degrees[v])
        dst[offsets[v]:offsets[v] + d] = rng.permutation(num_vertices)[:d]
    for _ in range(200):
        order = np.lexsort((dst, src))
        s, t = src[order], dst[order]
        dup = np.flatnonzero((s[1:] == s[:-1]) & (t[1:] == t[:-1])) + 1
        if dup.size == 0:
            return dst
        bad = order[dup]
        dst[bad] = rng.integers(0, num_vertices, bad.size, dtype=np.int64)
    raise RuntimeError("destination sampling did not converge")


def generate_uniform(num_vertices: int, min_degree: int, max_degree: int,
                     seed: int = DEFAULT_GRAPH_SEED, *, edge_elem_bytes: int = 4) -> CsrGraph:
    """Random graph with out-degrees drawn uniformly from [min_degree, max_degree]."""
    if not (0 <= min_degree <= max_degree < num_vertices):
        raise ValueError("require 0 <= min_degree <= max_degree < num_vertices")
    rng = np.random.default_rng(seed)
    degrees = rng.integers(min_degree, max_degree + 1, num_vertices, dtype=np.int64)
    dst = _sample_destinations(degrees, num_vertices, rng)
    offsets = np.concatenate(([0], np.cumsum(degrees, dtype=np.int64)))
    g = CsrGraph(num_vertices=num_vertices, num_edges=int(offsets[-1]), offsets=offsets,
                 edges=dst, edge_elem_bytes=edge_elem_bytes)
    validate(g)
    return g


def generate_powerlaw(num_vertices: int, target_avg_degree: float, exponent: float = 2.0,
                      seed: int = DEFAULT_GRAPH_SEED, *, edge_elem_bytes: int = 4) -> CsrGraph:
    """Heavily skewed degree sequence from a truncated discrete power law.

    Degrees are inverse-CDF samples from a Pareto truncated to [1, V-1],
    rescaled until the mean lands within 10% of target_avg_degree.
    """
    if num_vertices < 2:
        raise ValueError("need at least 2 vertices")
    if exponent <= 1.0:
        raise ValueError("exponent must be > 1")
    if target_avg_degree < 1.0:
        raise ValueError("target_avg_degree must be >= 1")
    rng = np.random.default_rng(seed)
    dmax = num_vertices - 1
    u = rng.random(num_vertices)
    # Inverse CDF of P(X <= x) on [1, dmax] for density proportional to x^-exponent.
    tail = 1.0 - float(dmax) ** (1.0 - exponent)
    x = (1.0 - u * tail) ** (1.0 / (1.0 - exponent))
    for _ in range(100):
        degrees = np.clip(np.rint(x), 0, dmax).astype(np.int64)
        mean = float(degrees.mean())
        if mean > 0 and abs(mean - target_avg_degree) <= 0.1 * target_avg_degree:
            break
        x = x * (target_avg_degree / max(mean, 1e-9))
    else:
        raise RuntimeError("degree rescaling did not converge")
    dst = _sample_destinations(degrees, num_vertices, rng)
    offsets = np.concatenate(([0], np.cumsum(degrees, dtype=np.int64)))
    g = CsrGraph(num_vertices=num_vertices, num_edges=int(offsets[-1]), offsets=offsets,
                 edges=dst, edge_elem_bytes=edge_elem_bytes)
    validate(g)
    return g


@dataclass
class DegreeCdf:
    """Cumulative fraction of edges owned by vertices of degree <= d."""

    degrees: np.ndarray
    cumulative_edge_fraction: np.ndarray

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(int(d), float(f)) for d, f in zip(self.degrees, self.cumulative_edge_fraction)]


def degree_cdf(g: CsrGraph) -> DegreeCdf:
    if g.num_edges == 0:
        return DegreeCdf(np.array([], dtype=np.int64), np.array([], dtype=np.float64))
    uniq, counts = np.unique(g.degrees, return_counts=True)
    edge_mass = uniq * counts
    frac = np.cumsum(edge_mass) / g.num_edges
    return DegreeCdf(uniq.astype(np.int64), frac.astype(np.float64))


def pick_sources(g: CsrGraph, n: int, seed: int = DEFAULT_SOURCE_SEED) -> np.ndarray:
    """n distinct start vertices, each guaranteed at least one out-edge."""
    candidates = np.flatnonzero(g.degrees > 0)
    if candidates.size < n:
        raise ValueError(f"only {candidates.size} vertices have out-edges, need {n}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(candidates, size=n, replace=False).astype(np.int64))


def symmetrized(g: CsrGraph) -> CsrGraph:
    """Union of the graph with its reverse, marked undirected. No dedup."""
    src = np.repeat(np.arange(g.num_vertices, dtype=np.int64), g.degrees)
    all_src = np.concatenate((src, g.edges))
    all_dst = np.concatenate((g.edges, src))
    wgt = None if g.weights is None else np.concatenate((g.weights, g.weights))
    order = np.lexsort((all_dst, all_src))
    return _from_sorted_edges(g.num_vertices, all_src[order], all_dst[order],
                              None if wgt is None else wgt[order],
                              g.edge_elem_bytes, g.weight_elem_bytes, directed=False)


def with_uniform_weights(g: CsrGraph, low: int = 8, high: int = 72,
                         seed: int = DEFAULT_WEIGHT_SEED,
                         weight_elem_bytes: Optional[int] = None) -> CsrGraph:
    """Copy of the graph with integer weights drawn uniformly from [low, high]."""
    rng = np.random.default_rng(seed)
    w = rng.integers(low, high + 1, g.num_edges, dtype=np.int64)
    return replace(g, weights=w,
                   weight_elem_bytes=weight_elem_bytes or g.weight_elem_bytes)
