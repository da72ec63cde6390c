#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Times the three hot kernels (successor chase, multi-source BFS, min-rank
descent) on synthetic chain and random instances, plus the end-to-end
chain and breadth-first tallies under both backends.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 100000,1000000] [--reps 5]

The dispatch-time backend is controlled by LIQUID_TALLY_NO_NUMBA; this
script bypasses the dispatcher and calls both implementations directly,
so it works regardless of the flag.
"""

import argparse
import gc
import random
import time

import numpy as np

from liquidtally import kernels
from liquidtally.gen import GenConfig, random_graph
from liquidtally.mechanisms import tally_bfd, tally_lf
from liquidtally.model import PreferenceGraph, PreferenceKind, tally_from_routing


def best_of(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def chain_arrays(n, seed):
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    nxt = np.full(n, -1, np.int64)
    for i in range(n - 1):
        nxt[order[i]] = order[i + 1]
    is_voter = np.zeros(n, bool)
    is_voter[order[-1]] = True
    return nxt, is_voter


def functional_arrays(n, seed):
    rng = np.random.default_rng(seed)
    nxt = rng.integers(-1, n, size=n).astype(np.int64)
    nxt[nxt == np.arange(n)] = -1
    is_voter = rng.random(n) < 0.2
    nxt[is_voter] = -1
    return nxt, is_voter


def rev_csr(n, pairs):
    indptr = np.zeros(n + 1, np.int64)
    for _, d in pairs:
        indptr[d + 1] += 1
    indptr = np.cumsum(indptr)
    fill = indptr[:-1].copy()
    indices = np.zeros(len(pairs), np.int64)
    for s, d in pairs:
        indices[fill[d]] = s
        fill[d] += 1
    return indptr, indices


def bench_chase(n, reps):
    rows = []
    for label, (nxt, isv) in (
        ("chain", chain_arrays(n, 1)),
        ("random", functional_arrays(n, 2)),
    ):
        t_np = best_of(lambda: kernels.chase_numpy(nxt, isv), reps)
        row = [f"chase/{label}", n, t_np, None]
        if kernels.HAVE_NUMBA:
            t_nb = best_of(lambda: kernels.chase_numba(nxt, isv), reps)
            row[3] = t_nb
        rows.append(row)
    return rows


def bench_bfs(n, reps):
    rng = np.random.default_rng(3)
    m = 3 * n
    pairs = list(zip(rng.integers(0, n, m).tolist(), rng.integers(0, n, m).tolist()))
    pairs = [(s, d) for s, d in pairs if s != d]
    isv = rng.random(n) < 0.1
    indptr, indices = rev_csr(n, pairs)
    t_np = best_of(lambda: kernels.bfs_dist_numpy(indptr, indices, isv), reps)
    t_nb = None
    if kernels.HAVE_NUMBA:
        t_nb = best_of(lambda: kernels.bfs_dist_numba(indptr, indices, isv), reps)
    return [["bfs_dist/random", n, t_np, t_nb]]


def bench_tallies(n, reps):
    rng = random.Random(4)
    width = len(str(n))
    ids = [f"a{i:0{width}d}" for i in range(1, n + 1)]
    rng.shuffle(ids)
    chain = PreferenceGraph(
        edges=[(ids[i], ids[i + 1]) for i in range(n - 1)], votes={ids[-1]: "yes"}
    )
    mrp = random_graph(GenConfig(kind=PreferenceKind.MRP, n_agents=n, voter_fraction=0.1,
                                 edge_density=1.0, max_out_degree=3, seed=5))
    rows = []
    for label, g, tally in (("tally_lf/chain", chain, tally_lf), ("tally_bfd/random", mrp, tally_bfd)):
        t = best_of(lambda: tally_from_routing(g, tally(g)), reps)
        rows.append([label, n, None, None, t])
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100000,1000000",
                        help="comma list of instance sizes")
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if kernels.HAVE_NUMBA:
        kernels.warm_up()
        print(f"numba available; dispatch backend: {kernels.backend()}")
    else:
        print("numba unavailable; numpy fallback only")
    gc.disable()

    header = f"{'kernel':<22}{'n':>10}{'numpy':>12}{'numba':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for name, size, t_np, t_nb, *rest in (
            bench_chase(n, args.reps) + bench_bfs(n, args.reps)
        ):
            speed = f"{t_np / t_nb:8.1f}x" if t_nb else "      --"
            nb = f"{t_nb * 1e3:9.1f} ms" if t_nb else "       --"
            print(f"{name:<22}{size:>10}{t_np * 1e3:9.1f} ms{nb}{speed}")
    print()
    print(f"{'end-to-end tally':<22}{'n':>10}{'wall':>12}   (dispatch backend: {kernels.backend()})")
    print("-" * len(header))
    for n in sizes:
        for name, size, _, _, t in bench_tallies(n, args.reps):
            print(f"{name:<22}{size:>10}{t * 1e3:9.1f} ms")


if __name__ == "__main__":
    main()
