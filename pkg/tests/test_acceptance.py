"""Acceptance suite: one test per shipped criterion, summarized at session end.

Each test records its checks plus its own runtime against the criterion's
budget; the conftest hook prints one PASS/FAIL line per criterion after the
run. Expensive shared inputs (the two 100k-vertex graphs and their BFS
traffic) are session fixtures pulled lazily so their cost lands inside the
budget of the first criterion that needs them.
"""

import json

import numpy as np
import pytest

from zcgraph import (GIB, AccessStrategy, LinkModel, TrafficStats, UvmConfig,
                     WarpAccess, bfs, cc, coalesce, estimate_transfer,
                     generate_powerlaw, generate_uniform,
                     latency_bound_bandwidth, pagerank, pick_sources,
                     replay_page_stream, sssp, symmetrized, tags_needed,
                     tlp_overhead_ratio, with_uniform_weights)
from zcgraph.access import REGION_EDGES, WARP_LANES
from zcgraph.cli import main
from zcgraph.traversal import UNREACHED_DIST

from reference import (bfs_levels, cc_min_labels, coalesce_bitmap,
                       dijkstra_distances, pagerank_dense, random_csr)

STRATEGY_ORDER = (AccessStrategy.NAIVE, AccessStrategy.MERGED,
                  AccessStrategy.MERGED_ALIGNED)


@pytest.fixture(scope="session")
def powerlaw_bfs():
    g = generate_powerlaw(100_000, 71.0, seed=3)
    source = int(pick_sources(g, 1, seed=7)[0])
    runs = {s: bfs(g, source, s,
                   want_pages=(s is AccessStrategy.MERGED_ALIGNED))
            for s in STRATEGY_ORDER}
    return g, runs


@pytest.fixture(scope="session")
def uniform_bfs():
    g = generate_uniform(100_000, 16, 48, seed=3)
    source = int(pick_sources(g, 1, seed=7)[0])
    runs = {s: bfs(g, source, s,
                   want_pages=(s is AccessStrategy.MERGED_ALIGNED))
            for s in (AccessStrategy.MERGED, AccessStrategy.MERGED_ALIGNED)}
    return g, runs


def test_criterion_01_micro_patterns(acceptance, capsys):
    rec = acceptance(1)
    assert main(["micro", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    strided = out["strided"]
    rec.check(strided["hist"] == {"32": 32, "64": 0, "96": 0, "128": 0}
              and strided["requests_total"] == 32,
              f"strided all-32B: {strided['hist']}")
    aligned = out["merged_aligned"]
    rec.check(aligned["hist"] == {"32": 0, "64": 0, "96": 0, "128": 1},
              f"aligned single 128B: {aligned['hist']}")
    mis = out["misaligned_32"]
    rec.check(mis["hist"] == {"32": 1, "64": 0, "96": 1, "128": 0},
              f"misaligned one 32B plus one 96B: {mis['hist']}")
    rec.finish(1.0)


def test_criterion_02_link_arithmetic(acceptance):
    rec = acceptance(2)
    r32 = tlp_overhead_ratio(32)
    rec.check(abs(r32 - 0.360) < 1e-9, f"overhead(32B)={r32:.3f}")
    r128 = tlp_overhead_ratio(128)
    rec.check(abs(r128 - 0.123) <= 5e-4, f"overhead(128B)={r128:.4f}")
    b10 = latency_bound_bandwidth(32, LinkModel(rtt_seconds=1.0e-6,
                                                tag_limit=256)) / GIB
    rec.check(abs(b10 - 7.63) <= 0.01, f"latency bound 32B@1.0us={b10:.3f} GiB/s")
    b16 = latency_bound_bandwidth(32, LinkModel(rtt_seconds=1.6e-6,
                                                tag_limit=256)) / GIB
    rec.check(abs(b16 - 4.77) <= 0.01, f"latency bound 32B@1.6us={b16:.3f} GiB/s")
    tags = tags_needed(16 * GIB, 128)
    rec.check(tags == 135, f"tags for 16 GiB/s at 128B={tags}")
    rec.finish(1.0)


def test_criterion_03_request_merging(acceptance, request):
    rec = acceptance(3)
    _, runs = request.getfixturevalue("powerlaw_bfs")
    n = runs[AccessStrategy.NAIVE].total_traffic.request_count
    m = runs[AccessStrategy.MERGED].total_traffic.request_count
    a = runs[AccessStrategy.MERGED_ALIGNED].total_traffic.request_count
    rec.check(m <= 0.25 * n, f"merged/naive={m / n:.4f} <= 0.25")
    rec.check((n - m) / n >= 0.75, f"naive->merged reduction={(n - m) / n:.1%}")
    rec.check(a <= m, f"aligned count {a} <= merged count {m}")
    rec.check(m - a > 0, f"merged->aligned removes {m - a} requests")
    rec.finish(60.0)


def test_criterion_04_size_distribution(acceptance, request):
    rec = acceptance(4)
    _, pl_runs = request.getfixturevalue("powerlaw_bfs")
    f = {s: pl_runs[s].total_traffic.fraction(128) for s in STRATEGY_ORDER}
    rec.check(f[AccessStrategy.NAIVE] < f[AccessStrategy.MERGED]
              < f[AccessStrategy.MERGED_ALIGNED],
              "powerlaw f128 strictly increasing: "
              f"{f[AccessStrategy.NAIVE]:.4f} < {f[AccessStrategy.MERGED]:.4f}"
              f" < {f[AccessStrategy.MERGED_ALIGNED]:.4f}")
    _, un_runs = request.getfixturevalue("uniform_bfs")
    gain = (un_runs[AccessStrategy.MERGED_ALIGNED].total_traffic.fraction(128)
            - un_runs[AccessStrategy.MERGED].total_traffic.fraction(128))
    rec.check(gain < 0.05,
              f"uniform aligned gain {100 * gain:.2f}pp < 5pp "
              "(known model limit: per-step coalescing with no cache "
              "puts the uniform gain near 10pp)")
    rec.finish(60.0)


def test_criterion_05_amplification(acceptance, request):
    rec = acceptance(5)
    pl_g, pl_runs = request.getfixturevalue("powerlaw_bfs")
    un_g, un_runs = request.getfixturevalue("uniform_bfs")
    results = {}
    for label, g, runs in (("powerlaw", pl_g, pl_runs),
                           ("uniform", un_g, un_runs)):
        dataset = g.edge_list_bytes
        run = runs[AccessStrategy.MERGED_ALIGNED]
        zc = run.total_traffic.payload_bytes / dataset
        cfg = UvmConfig(device_capacity_bytes=dataset // 4)
        uvm = replay_page_stream(run.page_streams, cfg, dataset).amplification
        results[label] = (zc, uvm)
    pl_zc, pl_uvm = results["powerlaw"]
    rec.check(pl_uvm > 1.5, f"powerlaw uvm amplification {pl_uvm:.3f} > 1.5")
    rec.check(pl_zc <= 1.31, f"powerlaw zero-copy amplification {pl_zc:.3f} <= 1.31")
    for label, (zc, uvm) in results.items():
        rec.check(zc < uvm, f"{label}: zero-copy {zc:.3f} < uvm {uvm:.3f}")
    rec.finish(120.0)


@pytest.mark.filterwarnings("ignore:multigraph input")
def test_criterion_06_oracle_equivalence(acceptance):
    rec = acceptance(6)
    per_algo = 100
    rng = np.random.default_rng(1234)

    ok = 0
    for _ in range(per_algo):
        g = random_csr(rng, 200)
        src = int(rng.integers(g.num_vertices))
        got = bfs(g, src, collect_traffic=False).values.tolist()
        ok += got == bfs_levels(g, src)
    rec.check(ok == per_algo, f"bfs vs queue oracle {ok}/{per_algo}")

    ok = 0
    for _ in range(per_algo):
        g = random_csr(rng, 200, weighted=True)
        src = int(rng.integers(g.num_vertices))
        got = sssp(g, src, collect_traffic=False).values
        expect = dijkstra_distances(g, src)
        ok += all((got[v] == UNREACHED_DIST) if e == float("inf")
                  else (got[v] == e) for v, e in enumerate(expect))
    rec.check(ok == per_algo, f"sssp vs dijkstra oracle {ok}/{per_algo}")

    ok = 0
    for _ in range(per_algo):
        g = random_csr(rng, 200, undirected=True)
        ok += cc(g, collect_traffic=False).values.tolist() == cc_min_labels(g)
    rec.check(ok == per_algo, f"cc vs union-find oracle {ok}/{per_algo}")

    worst = 0.0
    ok = 0
    for _ in range(per_algo):
        g = random_csr(rng, 200)
        got = pagerank(g, tol=1e-13, max_iters=600,
                       collect_traffic=False).values
        err = float(np.abs(got - pagerank_dense(g)).max())
        worst = max(worst, err)
        ok += err < 1e-8
    rec.check(ok == per_algo,
              f"pr vs dense power iteration {ok}/{per_algo}, "
              f"worst L-inf {worst:.2e}")
    rec.finish(60.0)


def test_criterion_07_coalescer_oracle(acceptance):
    rec = acceptance(7)
    rng = np.random.default_rng(99)
    mismatches = 0
    total = 10_000
    for _ in range(total):
        elem_bytes = int(rng.choice([4, 8]))
        span = int(rng.integers(1, 9)) * 128 // elem_bytes
        elems = rng.integers(0, span, size=WARP_LANES)
        active = rng.random(WARP_LANES) < 0.8
        if not active.any():
            active[int(rng.integers(WARP_LANES))] = True
        wa = WarpAccess(
            tuple(int(e) * elem_bytes if on else 0
                  for e, on in zip(elems, active)),
            tuple(bool(b) for b in active), REGION_EDGES, elem_bytes)
        got = sorted((r.base_addr, r.size_bytes) for r in coalesce(wa))
        mismatches += got != coalesce_bitmap(wa)
    rec.check(mismatches == 0,
              f"{total - mismatches}/{total} random warps match the bitmap oracle")
    rec.finish(10.0)


@pytest.mark.filterwarnings("ignore:multigraph input")
def test_criterion_08_strategy_independence(acceptance):
    rec = acceptance(8)
    rng = np.random.default_rng(4321)
    graphs = 20
    agree = 0
    for _ in range(graphs):
        g = with_uniform_weights(random_csr(rng, 120, allow_empty=False))
        gu = symmetrized(g)
        src = int(pick_sources(g, 1)[0])
        outputs = []
        for s in STRATEGY_ORDER:
            outputs.append((bfs(g, src, s, collect_traffic=False).values,
                            sssp(g, src, s, collect_traffic=False).values,
                            cc(gu, s, collect_traffic=False).values,
                            pagerank(g, s, collect_traffic=False).values))
        agree += all(np.array_equal(outputs[0][k], outputs[i][k])
                     for i in (1, 2) for k in range(4))
    rec.check(agree == graphs,
              f"identical results across strategies on {agree}/{graphs} graphs")
    rec.finish(30.0)


def test_criterion_09_interconnect_scaling(acceptance):
    rec = acceptance(9)
    stats = TrafficStats.from_size_counts([0, 0, 0, 100_000])
    base = LinkModel()
    doubled = LinkModel(peak_bandwidth_bytes_per_sec=24 * GIB)
    est_base = estimate_transfer(stats, base)
    est_double = estimate_transfer(stats, doubled)
    factor = est_base.est_seconds / est_double.est_seconds
    rec.check(1.8 <= factor <= 2.0,
              f"12.3->24 GiB/s speeds up all-128B transfer by {factor:.4f}x")

    g = generate_uniform(2000, 4, 12, seed=3)
    run = bfs(g, int(pick_sources(g, 1)[0]), want_pages=True)
    cfg = UvmConfig(device_capacity_bytes=max(4096, g.edge_list_bytes // 4))
    replays = [replay_page_stream(run.page_streams, cfg, g.edge_list_bytes)
               for _ in (base, doubled)]
    rec.check(replays[0].bytes_migrated == replays[1].bytes_migrated,
              f"uvm bytes {replays[0].bytes_migrated} independent of link speed")
    rec.finish(10.0)
