"""Array kernels for the hot loops of the chain and breadth-first tallies.

Each kernel has a numba ``@njit`` implementation and a pure-numpy twin.
The backend is picked at import time: numba when importable, unless the
env var ``LIQUID_TALLY_NO_NUMBA`` is set to ``1``/``true``/``yes``.
``benchmarks/bench_kernels.py`` times the two against each other.

Conventions: agents are the integers ``0..n-1``; ``-1`` marks "no
successor" / "unreachable" throughout.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


_FLAG = os.environ.get("LIQUID_TALLY_NO_NUMBA", "").strip().lower()
NUMBA_ENABLED = HAVE_NUMBA and _FLAG not in ("1", "true", "yes")


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


# ---------------------------------------------------------------------------
# chase: resolve a functional successor graph to terminal voters
# ---------------------------------------------------------------------------


@njit(cache=True)
def _chase_numba(next_idx, is_voter):  # pragma: no cover - exercised via dispatch
    n = next_idx.shape[0]
    final = np.full(n, -1, np.int64)
    state = np.zeros(n, np.uint8)  # 0 unknown, 1 on current walk, 2 done
    stack = np.empty(n, np.int64)
    for start in range(n):
        if state[start] == 2:
            continue
        depth = 0
        cur = start
        res = np.int64(-1)
        while True:
            if is_voter[cur]:
                final[cur] = cur
                state[cur] = 2
                res = cur
                break
            if state[cur] == 2:
                res = final[cur]
                break
            if state[cur] == 1:
                res = -1  # walked into the current chain: a voterless cycle
                break
            nxt = next_idx[cur]
            if nxt < 0:
                state[cur] = 2
                res = -1  # dead end (abstainer)
                break
            state[cur] = 1
            stack[depth] = cur
            depth += 1
            cur = nxt
        for k in range(depth - 1, -1, -1):
            node = stack[k]
            final[node] = res
            state[node] = 2
    return final


@njit(cache=True)
def _chase_doubling_numba(next_idx, is_voter):  # pragma: no cover
    n = next_idx.shape[0]
    ptr = np.empty(n + 1, np.int64)
    for i in range(n):
        if is_voter[i]:
            ptr[i] = i
        elif next_idx[i] >= 0:
            ptr[i] = next_idx[i]
        else:
            ptr[i] = n
    ptr[n] = n
    buf = np.empty(n + 1, np.int64)
    passes = 1
    size = 2
    while size < n:
        size <<= 1
        passes += 1
    for _ in range(passes):
        changed = False
        for i in range(n + 1):
            b = ptr[ptr[i]]
            if b != ptr[i]:
                changed = True
            buf[i] = b
        ptr, buf = buf, ptr
        if not changed:
            break
    final = np.empty(n, np.int64)
    for i in range(n):
        p = ptr[i]
        if p < n and is_voter[p]:
            final[i] = p
        else:
            final[i] = -1
    return final


# Below this size the whole working set sits in cache and the serial memo
# walk (true O(n)) wins; beyond it the walk's dependent loads stall on
# memory latency, so the doubling variant's independent gathers win even
# though they cost an extra log factor.
CHASE_DOUBLING_THRESHOLD = 1 << 17


def chase_numba(next_idx: np.ndarray, is_voter: np.ndarray) -> np.ndarray:
    nxt = np.ascontiguousarray(next_idx, dtype=np.int64)
    isv = np.ascontiguousarray(is_voter, dtype=np.bool_)
    if nxt.shape[0] > CHASE_DOUBLING_THRESHOLD:
        return _chase_doubling_numba(nxt, isv)
    return _chase_numba(nxt, isv)


def chase_numpy(next_idx: np.ndarray, is_voter: np.ndarray) -> np.ndarray:
    """Pointer-doubling resolution; O(n log n) with absorbing fixed points."""
    n = len(next_idx)
    if n == 0:
        return np.empty(0, np.int64)
    next_idx = np.asarray(next_idx, dtype=np.int64)
    is_voter = np.asarray(is_voter, dtype=np.bool_)
    idx = np.arange(n, dtype=np.int64)
    # voters absorb at themselves, dead ends at the sentinel slot n
    ptr = np.where(is_voter, idx, np.where(next_idx >= 0, next_idx, n))
    ptr = np.append(ptr, np.int64(n))
    doublings = max(1, int(np.ceil(np.log2(n))) + 1)
    for _ in range(doublings):
        ptr = ptr[ptr]
    final = ptr[:n]
    voter_plus = np.append(is_voter, False)
    resolved = voter_plus[final]  # cycle walkers never land on a voter or sentinel
    return np.where(resolved, final, np.int64(-1))


def chase(next_idx: np.ndarray, is_voter: np.ndarray) -> np.ndarray:
    """final voter index per agent, -1 where the chain never reaches a voter."""
    if NUMBA_ENABLED:
        return chase_numba(next_idx, is_voter)
    return chase_numpy(next_idx, is_voter)


# ---------------------------------------------------------------------------
# bfs_dist: hop distance to the nearest voter (over reverse adjacency)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _bfs_numba(rev_indptr, rev_indices, is_voter):  # pragma: no cover
    n = is_voter.shape[0]
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    tail = 0
    for v in range(n):
        if is_voter[v]:
            dist[v] = 0
            queue[tail] = v
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(rev_indptr[v], rev_indptr[v + 1]):
            u = rev_indices[e]
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue[tail] = u
                tail += 1
    return dist


def bfs_dist_numba(rev_indptr, rev_indices, is_voter) -> np.ndarray:
    return _bfs_numba(
        np.ascontiguousarray(rev_indptr, dtype=np.int64),
        np.ascontiguousarray(rev_indices, dtype=np.int64),
        np.ascontiguousarray(is_voter, dtype=np.bool_),
    )


def _ragged_gather(indptr, indices, nodes):
    starts = indptr[nodes]
    counts = indptr[nodes + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64)
    group_off = np.repeat(np.cumsum(counts) - counts, counts)
    offs = np.repeat(starts, counts) + (np.arange(total, dtype=np.int64) - group_off)
    return indices[offs]


def bfs_dist_numpy(rev_indptr, rev_indices, is_voter) -> np.ndarray:
    """Frontier-at-a-time BFS with vectorized neighbor gathering."""
    rev_indptr = np.asarray(rev_indptr, dtype=np.int64)
    rev_indices = np.asarray(rev_indices, dtype=np.int64)
    is_voter = np.asarray(is_voter, dtype=np.bool_)
    n = len(is_voter)
    dist = np.full(n, -1, np.int64)
    frontier = np.flatnonzero(is_voter)
    dist[frontier] = 0
    d = 0
    while frontier.size:
        neigh = _ragged_gather(rev_indptr, rev_indices, frontier)
        neigh = neigh[dist[neigh] < 0]
        if neigh.size == 0:
            break
        frontier = np.unique(neigh)
        d += 1
        dist[frontier] = d
    return dist


def bfs_dist(rev_indptr, rev_indices, is_voter) -> np.ndarray:
    if NUMBA_ENABLED:
        return bfs_dist_numba(rev_indptr, rev_indices, is_voter)
    return bfs_dist_numpy(rev_indptr, rev_indices, is_voter)


# ---------------------------------------------------------------------------
# min_rank_descent: per agent, lowest-rank edge that steps one hop closer
# ---------------------------------------------------------------------------


@njit(cache=True)
def _descent_numba(indptr, dst, rank, dist):  # pragma: no cover
    n = indptr.shape[0] - 1
    succ = np.full(n, -1, np.int64)
    for u in range(n):
        if dist[u] <= 0:
            continue
        best_rank = np.int64(0)
        best = np.int64(-1)
        for e in range(indptr[u], indptr[u + 1]):
            v = dst[e]
            if dist[v] == dist[u] - 1 and (best < 0 or rank[e] < best_rank):
                best_rank = rank[e]
                best = v
        succ[u] = best
    return succ


def min_rank_descent_numba(indptr, dst, rank, dist) -> np.ndarray:
    return _descent_numba(
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(dst, dtype=np.int64),
        np.ascontiguousarray(rank, dtype=np.int64),
        np.ascontiguousarray(dist, dtype=np.int64),
    )


def min_rank_descent_numpy(indptr, dst, rank, dist) -> np.ndarray:
    indptr = np.asarray(indptr, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    rank = np.asarray(rank, dtype=np.int64)
    dist = np.asarray(dist, dtype=np.int64)
    n = len(indptr) - 1
    succ = np.full(n, -1, np.int64)
    if len(dst) == 0:
        return succ
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    usable = (dist[src] > 0) & (dist[dst] == dist[src] - 1)
    if not usable.any():
        return succ
    s, d, rk = src[usable], dst[usable], rank[usable]
    order = np.lexsort((rk, s))
    s, d = s[order], d[order]
    firsts = np.unique(s, return_index=True)
    succ[firsts[0]] = d[firsts[1]]
    return succ


def min_rank_descent(indptr, dst, rank, dist) -> np.ndarray:
    if NUMBA_ENABLED:
        return min_rank_descent_numba(indptr, dst, rank, dist)
    return min_rank_descent_numpy(indptr, dst, rank, dist)


def warm_up() -> None:
    """Trigger JIT compilation of all kernels on tiny inputs."""
    nxt = np.array([1, -1], dtype=np.int64)
    isv = np.array([False, True])
    chase(nxt, isv)
    indptr = np.array([0, 1, 1], dtype=np.int64)
    idx = np.array([0], dtype=np.int64)
    bfs_dist(indptr, idx, isv)
    min_rank_descent(np.array([0, 1, 1], dtype=np.int64), np.array([1], dtype=np.int64),
                     np.array([1], dtype=np.int64), np.array([1, 0], dtype=np.int64))
