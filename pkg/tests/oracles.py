"""Independent reference implementations used only as test oracles.

Deliberately naive: full enumeration, networkx primitives, no sharing of
code with the shipped algorithms.
"""

from __future__ import annotations

import itertools

import networkx as nx

from liquidtally.model import Outcome, PreferenceGraph, VotePath


def nx_digraph(g: PreferenceGraph) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(g.agents)
    for e in g.edges:
        G.add_edge(e.src, e.dst, rank=e.rank)
    return G


def oracle_delegable(g: PreferenceGraph) -> set[str]:
    G = nx_digraph(g)
    out = set()
    for v in g.votes:
        out |= nx.ancestors(G, v)
    return out - set(g.votes)


def all_voter_paths(g: PreferenceGraph, origin: str) -> list[tuple[str, ...]]:
    """Every simple path from origin to any voter, as node tuples."""
    G = nx_digraph(g)
    paths = []
    for target in g.votes:
        if target == origin:
            continue
        paths.extend(tuple(p) for p in nx.all_simple_paths(G, origin, target))
    # drop paths with a voter in a non-final position
    ok = []
    for p in paths:
        if all(n not in g.votes for n in p[:-1]):
            ok.append(p)
    return ok


def _ranks_of(g: PreferenceGraph, nodes: tuple[str, ...]) -> tuple[int, ...]:
    rank = {(e.src, e.dst): e.rank for e in g.edges}
    return tuple(rank[(u, v)] for u, v in zip(nodes, nodes[1:]))


def _as_path(g: PreferenceGraph, nodes: tuple[str, ...]) -> VotePath:
    return VotePath(nodes[0], tuple(nodes[1:]), g.votes[nodes[-1]])


def oracle_lf_route(g: PreferenceGraph, a: str) -> VotePath | None:
    """Naive chain walk with an explicit visited set."""
    if a in g.votes:
        return VotePath(a, (), g.votes[a])
    nodes = [a]
    seen = {a}
    cur = a
    while True:
        out = g.out_edges(cur)
        if not out:
            return None
        assert len(out) == 1
        cur = out[0].dst
        if cur in seen:
            return None
        nodes.append(cur)
        seen.add(cur)
        if cur in g.votes:
            return _as_path(g, tuple(nodes))


def oracle_bfd_route(g: PreferenceGraph, a: str) -> VotePath | None:
    """Brute force: all simple paths, min by (length, rank sequence)."""
    if a in g.votes:
        return VotePath(a, (), g.votes[a])
    cands = all_voter_paths(g, a)
    if not cands:
        return None
    best = min(cands, key=lambda p: (len(p) - 1, _ranks_of(g, p)))
    return _as_path(g, best)


def oracle_dfd1_route(g: PreferenceGraph, a: str) -> VotePath | None:
    if a in g.votes:
        return VotePath(a, (), g.votes[a])
    cands = all_voter_paths(g, a)
    if not cands:
        return None
    best = min(cands, key=lambda p: _ranks_of(g, p))
    return _as_path(g, best)


def oracle_dfd2_route(g: PreferenceGraph, a: str) -> VotePath | None:
    if a in g.votes:
        return VotePath(a, (), g.votes[a])
    cands = all_voter_paths(g, a)
    if not cands:
        return None
    rank_of = {e.dst: e.rank for e in g.out_edges(a)}
    top = min({p[1] for p in cands}, key=lambda d: rank_of[d])
    narrowed = [p for p in cands if p[1] == top]
    best = min(narrowed, key=lambda p: (len(p) - 1, _ranks_of(g, p)))
    return _as_path(g, best)


def oracle_fluid(g: PreferenceGraph) -> tuple[int, int, set[str]]:
    """(optimum, optimal-selection count, winner set) by full enumeration.

    Enumerates every per-delegator successor choice over the agents that
    can reach a voter, keeping selections whose chains all terminate.
    """
    reach = oracle_delegable(g)
    voters = set(g.votes)
    delegators = sorted(reach)
    choice_lists = []
    for d in delegators:
        choice_lists.append(sorted(e.dst for e in g.out_edges(d) if e.dst in reach | voters))
    best = None
    count = 0
    winners: set[str] = set()
    for combo in itertools.product(*choice_lists) if delegators else [()]:
        succ = dict(zip(delegators, combo))
        loads = {v: 1 for v in voters}
        ok = True
        for start in delegators:
            cur = start
            steps = 0
            while cur not in voters:
                cur = succ.get(cur)
                steps += 1
                if cur is None or steps > len(delegators) + 1:
                    ok = False
                    break
            if not ok:
                break
            loads[cur] += 1
        if not ok:
            continue
        value = max(loads.values(), default=0)
        totals = {Outcome.YES: 0, Outcome.NO: 0}
        for v in voters:
            totals[g.votes[v]] += loads[v]
        if totals[Outcome.YES] > totals[Outcome.NO]:
            winner = "yes"
        elif totals[Outcome.NO] > totals[Outcome.YES]:
            winner = "no"
        else:
            winner = "tie"
        if best is None or value < best:
            best, count, winners = value, 1, {winner}
        elif value == best:
            count += 1
            winners.add(winner)
    if best is None:
        best = 1 if voters else 0
        count = 1
    return best, count, winners


def oracle_bfs_dist(g: PreferenceGraph) -> dict[str, int]:
    """Hop distance from each agent to its nearest voter (networkx)."""
    G = nx_digraph(g).reverse()
    dist: dict[str, int] = {}
    for v in g.votes:
        for node, d in nx.single_source_shortest_path_length(G, v).items():
            if node not in dist or d < dist[node]:
                dist[node] = d
    return dist
