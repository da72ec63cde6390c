"""The five centralized tally mechanisms.

Each mechanism maps a :class:`~liquidtally.model.PreferenceGraph` to a
:class:`~liquidtally.model.VoteRouting` (GreedyCap additionally to a
distribution over routings, the confluent-flow tally to the set of optimal
routings).  Mechanisms are strict about the preference kind they accept and
pure: identical inputs give byte-identical outputs (GreedyCap given an
identical seed).

Cycle behavior differs per mechanism: the chain tally discards agents on or
feeding voterless cycles; the ranked tallies route around cycles whenever a
member has an escape; the capped greedy tally is indifferent to cycles
(one-hop semantics); the confluent-flow tally discards only components with
no voter.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from . import flowopt, kernels
from .model import (
    LiquidTallyError,
    Outcome,
    PreferenceGraph,
    PreferenceKind,
    VotePath,
    VoteRouting,
    WrongKindError,
    classify_kind,
)

DEFAULT_ENUM_LIMIT = 100_000
DFD_PATH_GUARD = 1_000_000
DEFAULT_MC_TRIALS = 1000


class PathExplosionError(LiquidTallyError):
    """Simple-path enumeration exceeded the configured guard."""


@dataclass(frozen=True)
class MechanismInfo:
    """Static metadata for one mechanism (the audit's table rows start here)."""

    mechanism_id: str
    display_name: str
    preference_kind: PreferenceKind
    cycle_policy: str  # DC (discard) | BC (break) | AAC (assume away)
    power_policy: str  # none | CP (capped) | MP (minimized)
    running_time: str
    randomized: bool = False


MECHANISMS: dict[str, MechanismInfo] = {
    "lf": MechanismInfo("lf", "single-proxy chain tally", PreferenceKind.ONP, "DC", "none", "O(n)"),
    "bfd": MechanismInfo("bfd", "breadth-first delegation", PreferenceKind.MRP, "BC", "none", "O(n+m)"),
    "dfd1": MechanismInfo(
        "dfd1", "depth-first delegation (rank-lexicographic)", PreferenceKind.MRP, "BC", "none", "Omega(2^n)"
    ),
    "dfd2": MechanismInfo(
        "dfd2", "depth-first delegation (shortest from top choice)", PreferenceKind.MRP, "BC", "none", "Omega(2^n)"
    ),
    "greedycap": MechanismInfo(
        "greedycap", "capped greedy approval proxy", PreferenceKind.MUP, "AAC", "CP", "O(n lg n)", randomized=True
    ),
    "fluid": MechanismInfo(
        "fluid", "min-max confluent flow", PreferenceKind.MUP, "BC", "MP", "varies"
    ),
}


def _require_onp(g: PreferenceGraph) -> None:
    kind = classify_kind(g)
    if kind is not PreferenceKind.ONP:
        raise WrongKindError(f"chain tally needs one unranked choice per delegator, got {kind}")


def _require_ranked(g: PreferenceGraph) -> None:
    if g.m and classify_kind(g) is not PreferenceKind.MRP:
        raise WrongKindError("ranked tally needs every delegation edge ranked")


def _require_unranked(g: PreferenceGraph) -> None:
    if g.m and classify_kind(g) is PreferenceKind.MRP:
        raise WrongKindError("approval tally needs unranked delegation edges")


def _positions(g: PreferenceGraph) -> dict[str, int]:
    return g.positions()


def _voter_arrays(g: PreferenceGraph, pos: Mapping[str, int]) -> tuple[np.ndarray, np.ndarray]:
    n = g.n
    is_voter = np.zeros(n, dtype=np.bool_)
    vote_code = np.full(n, -1, dtype=np.int8)
    for a, o in g.votes.items():
        i = pos[a]
        is_voter[i] = True
        vote_code[i] = 1 if o is Outcome.YES else 0
    return is_voter, vote_code


def _outcome_codes(final: np.ndarray, vote_code: np.ndarray) -> np.ndarray:
    safe = np.where(final >= 0, final, 0)
    return np.where(final >= 0, vote_code[safe], np.int8(-1)).astype(np.int8)


def tally_lf(g: PreferenceGraph) -> VoteRouting:
    """Follow each agent's single out-chain until a voter.

    Agents on, or feeding only into, voterless cycles stay unresolved, as
    do edge-less abstainers and chains that dead-end at one.  Linear time:
    the chain resolution runs as an array kernel.
    """
    _require_onp(g)
    n = g.n
    esrc, edst, _ = g.index_arrays()
    next_idx = np.full(n, -1, dtype=np.int64)
    next_idx[esrc] = edst
    is_voter, vote_code = _voter_arrays(g, _positions(g))
    final = kernels.chase(next_idx, is_voter)
    return VoteRouting.from_arrays(g.agents, next_idx, final, _outcome_codes(final, vote_code))


def tally_bfd(g: PreferenceGraph) -> VoteRouting:
    """Shortest path to any voter, rank-lexicographic among equals.

    Distances come from a multi-source reverse BFS; each delegator then
    takes its minimal-rank edge that steps one hop closer, which yields the
    unique shortest path with lexicographically least rank sequence (ranks
    within one agent are distinct, so the greedy descent never ties).
    Agents with no path to a voter stay unresolved.
    """
    _require_ranked(g)
    n, m = g.n, g.m
    # canonical edge order is already grouped by src
    esrc, edst, erank = g.index_arrays()
    fwd_indptr = np.zeros(n + 1, dtype=np.int64)
    if m:
        np.add.at(fwd_indptr, esrc + 1, 1)
    fwd_indptr = np.cumsum(fwd_indptr)
    rev_order = np.argsort(edst, kind="stable") if m else np.empty(0, dtype=np.int64)
    rev_indices = esrc[rev_order]
    rev_indptr = np.zeros(n + 1, dtype=np.int64)
    if m:
        np.add.at(rev_indptr, edst + 1, 1)
    rev_indptr = np.cumsum(rev_indptr)

    is_voter, vote_code = _voter_arrays(g, _positions(g))
    dist = kernels.bfs_dist(rev_indptr, rev_indices, is_voter)
    succ = kernels.min_rank_descent(fwd_indptr, edst, erank, dist)
    final = kernels.chase(succ, is_voter)
    return VoteRouting.from_arrays(g.agents, succ, final, _outcome_codes(final, vote_code))


def _simple_paths(
    g: PreferenceGraph, origin: str, budget: list[int]
) -> list[tuple[tuple[int, ...], tuple[str, ...], Outcome]]:
    """All simple delegation paths origin -> voter as (ranks, hops, terminal).

    ``budget`` holds the shared remaining step allowance; exhausting it
    raises PathExplosionError.
    """
    results: list[tuple[tuple[int, ...], tuple[str, ...], Outcome]] = []
    hops: list[str] = []
    ranks: list[int] = []
    on_path = {origin}

    def walk(cur: str) -> None:
        for e in g.out_edges(cur):
            budget[0] -= 1
            if budget[0] < 0:
                raise PathExplosionError("simple-path enumeration guard exceeded")
            nxt = e.dst
            if nxt in on_path:
                continue
            hops.append(nxt)
            ranks.append(e.rank)
            if g.is_voter(nxt):
                results.append((tuple(ranks), tuple(hops), g.votes[nxt]))
            else:
                on_path.add(nxt)
                walk(nxt)
                on_path.discard(nxt)
            hops.pop()
            ranks.pop()

    walk(origin)
    return results


def tally_dfd(g: PreferenceGraph, approach: int, path_guard: int = DFD_PATH_GUARD) -> VoteRouting:
    """Depth-first style ranked tally; each vote follows its origin's path.

    Both variants first pin the origin's best-ranked neighbor through which
    some simple path to a voter exists.  Approach 1 then takes the
    rank-lexicographically least simple path (equivalently: greedily the
    best-ranked next step with a feasible continuation).  Approach 2 takes
    the shortest path starting at that neighbor, rank-lexicographic among
    equals.  Worst-case exponential; ``path_guard`` bounds total
    enumeration work.
    """
    if approach not in (1, 2):
        raise ValueError("approach must be 1 or 2")
    _require_ranked(g)
    budget = [path_guard]
    paths: dict[str, VotePath | None] = {}
    for a in g.agents:
        if g.is_voter(a):
            paths[a] = VotePath(a, (), g.votes[a])
            continue
        if not g.out_edges(a):
            paths[a] = None
            continue
        candidates = _simple_paths(g, a, budget)
        if not candidates:
            paths[a] = None
            continue
        if approach == 1:
            ranks, hops, terminal = min(candidates)
        else:
            rank_of = {e.dst: e.rank for e in g.out_edges(a)}
            top = min((c[1][0] for c in candidates), key=lambda d: rank_of[d])
            ranks, hops, terminal = min(
                (c for c in candidates if c[1][0] == top),
                key=lambda c: (len(c[1]), c[0]),
            )
        paths[a] = VotePath(a, hops, terminal)
    return VoteRouting(paths)


@dataclass(frozen=True)
class RoutingDistribution:
    """Distribution over routings with exact rational probabilities."""

    support: tuple[tuple[VoteRouting, Fraction], ...]

    def __post_init__(self):
        keys = [r.canonical_key() for r, _ in self.support]
        if len(set(keys)) != len(keys):
            raise LiquidTallyError("distribution support contains duplicate routings")
        for _, p in self.support:
            if not isinstance(p, Fraction) or not (0 < p <= 1):
                raise LiquidTallyError(f"probability {p!r} outside (0, 1]")
        if self.support and sum(p for _, p in self.support) != 1:
            raise LiquidTallyError("probabilities must sum to one")

    def __len__(self) -> int:
        return len(self.support)

    def __iter__(self) -> Iterator[tuple[VoteRouting, Fraction]]:
        return iter(self.support)

    def expected_share(self, g: PreferenceGraph, outcome: Outcome) -> Fraction:
        """Expected fraction of all n votes assigned to ``outcome``."""
        from .model import tally_from_routing

        total = Fraction(0)
        for routing, p in self.support:
            total += p * tally_from_routing(g, routing).totals[outcome]
        return total / g.n if g.n else Fraction(0)


def _sorted_distribution(acc: dict[tuple, tuple[VoteRouting, Fraction]]) -> RoutingDistribution:
    items = sorted(acc.items(), key=lambda kv: kv[0])
    return RoutingDistribution(tuple((r, p) for _, (r, p) in items))


@dataclass(frozen=True)
class GreedyCapResult:
    """Sampled routing plus the tie-breaking distribution behind it.

    ``exact`` is True when every random branch was enumerated (their count
    stayed within the limit); otherwise ``distribution`` is the Monte Carlo
    estimate from ``mc_trials`` seeded samples.
    """

    sampled: VoteRouting
    distribution: RoutingDistribution
    exact: bool
    branch_count: int | None
    cap: int
    seed: int


def _greedycap_baseline(g: PreferenceGraph) -> tuple[dict[str, "VotePath | None"], dict[str, str]]:
    paths: dict[str, VotePath | None] = {}
    notes: dict[str, str] = {}
    for a in g.agents:
        if g.is_voter(a):
            paths[a] = VotePath(a, (), g.votes[a])
        else:
            paths[a] = None
            if g.out_edges(a):
                notes[a] = "instructed-to-vote"
    return paths, notes


def _greedycap_routing(g: PreferenceGraph, assigned: Mapping[str, str]) -> VoteRouting:
    paths, notes = _greedycap_baseline(g)
    handoffs: dict[str, str] = {}
    held: dict[str, int] = {}
    for a, t in assigned.items():
        if g.is_voter(t):
            paths[a] = VotePath(a, (t,), g.votes[t])
            notes.pop(a, None)
        else:
            handoffs[a] = t
            notes[a] = f"delegated to non-voter {t}"
            held[t] = held.get(t, 0) + 1
    for t, k in held.items():
        notes[t] = f"instructed-to-vote; holds {k + 1} votes (unresolved terminal)"
    return VoteRouting(paths, handoffs=handoffs, notes=notes)


def _live_approvals(
    in_map: Mapping[str, tuple[str, ...]], remaining: set[str]
) -> dict[str, list[str]]:
    approvals = {}
    for v in remaining:
        live = [u for u in in_map.get(v, ()) if u in remaining]
        if live:
            approvals[v] = live
    return approvals


def _greedycap_once(g: PreferenceGraph, cap: int, rng: random.Random) -> dict[str, str]:
    in_map: dict[str, list[str]] = {}
    for e in g.edges:
        in_map.setdefault(e.dst, []).append(e.src)
    in_map_t = {v: tuple(sorted(us)) for v, us in in_map.items()}
    remaining = set(g.agents)
    assigned: dict[str, str] = {}
    while True:
        approvals = _live_approvals(in_map_t, remaining)
        if not approvals:
            break
        top = max(len(us) for us in approvals.values())
        cands = sorted(v for v, us in approvals.items() if len(us) == top)
        v = cands[0] if len(cands) == 1 else rng.choice(cands)
        approvers = sorted(approvals[v])
        k = min(cap - 1, len(approvers))
        chosen = approvers if k == len(approvers) else sorted(rng.sample(approvers, k))
        for u in chosen:
            assigned[u] = v
        remaining.discard(v)
        remaining.difference_update(chosen)
    return assigned


def _greedycap_branches(
    g: PreferenceGraph, cap: int, enum_limit: int
) -> dict[tuple, tuple[VoteRouting, Fraction]] | None:
    """Enumerate every tie/subset branch; None when leaves exceed the limit."""
    in_map: dict[str, list[str]] = {}
    for e in g.edges:
        in_map.setdefault(e.dst, []).append(e.src)
    in_map_t = {v: tuple(sorted(us)) for v, us in in_map.items()}
    acc: dict[tuple, tuple[VoteRouting, Fraction]] = {}
    leaves = 0

    def rec(remaining: frozenset, assigned: dict[str, str], prob: Fraction) -> bool:
        nonlocal leaves
        approvals = _live_approvals(in_map_t, set(remaining))
        if not approvals:
            leaves += 1
            if leaves > enum_limit:
                return False
            routing = _greedycap_routing(g, assigned)
            key = routing.canonical_key()
            if key in acc:
                acc[key] = (acc[key][0], acc[key][1] + prob)
            else:
                acc[key] = (routing, prob)
            return True
        top = max(len(us) for us in approvals.values())
        cands = sorted(v for v, us in approvals.items() if len(us) == top)
        p_v = prob / len(cands)
        for v in cands:
            approvers = sorted(approvals[v])
            k = min(cap - 1, len(approvers))
            n_subsets = math.comb(len(approvers), k)
            p_leaf = p_v / n_subsets
            for chosen in itertools.combinations(approvers, k):
                nxt = dict(assigned)
                for u in chosen:
                    nxt[u] = v
                rest = remaining - {v, *chosen}
                if not rec(rest, nxt, p_leaf):
                    return False
        return True

    ok = rec(frozenset(g.agents), {}, Fraction(1))
    return acc if ok else None


def tally_greedycap(
    g: PreferenceGraph,
    cap: int,
    seed: int = 0,
    *,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
    mc_trials: int = DEFAULT_MC_TRIALS,
) -> GreedyCapResult:
    """Iteratively give the most-approved remaining agent up to cap-1 approvers.

    Each round removes the target and the chosen approvers, who delegate
    exactly one hop.  Ties for most-approved and the approver subset are
    uniform at random, so the induced distribution over routings is unique;
    it is enumerated exactly while the branch count fits ``enum_limit`` and
    estimated from ``mc_trials`` seeded samples beyond that.  Leftover
    delegators are flagged instructed-to-vote; a non-voter target holds its
    received votes unresolved.
    """
    _require_unranked(g)
    if cap < 1:
        raise ValueError("cap must be a positive integer")
    sampled = _greedycap_routing(g, _greedycap_once(g, cap, random.Random(seed)))
    acc = _greedycap_branches(g, cap, enum_limit)
    if acc is not None:
        return GreedyCapResult(sampled, _sorted_distribution(acc), True, len(acc), cap, seed)
    rng = random.Random(seed)
    counts: dict[tuple, tuple[VoteRouting, int]] = {}
    for _ in range(mc_trials):
        routing = _greedycap_routing(g, _greedycap_once(g, cap, rng))
        key = routing.canonical_key()
        counts[key] = (routing, counts[key][1] + 1 if key in counts else 1)
    est = {k: (r, Fraction(c, mc_trials)) for k, (r, c) in counts.items()}
    return GreedyCapResult(sampled, _sorted_distribution(est), False, None, cap, seed)


@dataclass(frozen=True)
class FluidTallyResult:
    """Exact min-max confluent tally: optimum, canonical routing, all optima."""

    optimum: int
    canonical: VoteRouting
    all_optima: tuple[VoteRouting, ...]
    selections: tuple[flowopt.Selection, ...]
    truncated: bool

    def outcome_divergence(self, g: PreferenceGraph) -> bool:
        """True when two optimal routings produce different winners."""
        from .model import tally_from_routing

        winners = {tally_from_routing(g, r).winner() for r in self.all_optima}
        return len(winners) > 1


def tally_fluid(g: PreferenceGraph, enum_limit: int = DEFAULT_ENUM_LIMIT) -> FluidTallyResult:
    """Route every delegable agent confluently, minimizing the max voter power.

    All optimal selections are enumerated (up to ``enum_limit``,
    truncation flagged); the canonical routing comes from the
    lexicographically smallest optimal selection.  Agents with no path to
    any voter are unresolved.
    """
    _require_unranked(g)
    res = flowopt.solve_exact(g, enum_limit)
    routings = tuple(VoteRouting.from_successors(g, s) for s in res.selections)
    return FluidTallyResult(
        optimum=res.optimum,
        canonical=routings[0],
        all_optima=routings,
        selections=res.selections,
        truncated=res.truncated,
    )


@dataclass(frozen=True)
class MechanismRun:
    """Uniform result wrapper used by the audit, the CLI and fuzzing."""

    mechanism_id: str
    routing: VoteRouting
    distribution: RoutingDistribution | None = None
    greedycap: GreedyCapResult | None = None
    fluid: FluidTallyResult | None = None


def run_mechanism(
    mechanism_id: str,
    g: PreferenceGraph,
    *,
    cap: int | None = None,
    seed: int = 0,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
    path_guard: int = DFD_PATH_GUARD,
    mc_trials: int = DEFAULT_MC_TRIALS,
) -> MechanismRun:
    """Dispatch one mechanism by id; raises WrongKindError on kind mismatch."""
    if mechanism_id not in MECHANISMS:
        raise LiquidTallyError(f"unknown mechanism {mechanism_id!r}")
    if mechanism_id == "lf":
        return MechanismRun("lf", tally_lf(g))
    if mechanism_id == "bfd":
        return MechanismRun("bfd", tally_bfd(g))
    if mechanism_id in ("dfd1", "dfd2"):
        approach = 1 if mechanism_id == "dfd1" else 2
        return MechanismRun(mechanism_id, tally_dfd(g, approach, path_guard))
    if mechanism_id == "greedycap":
        if cap is None:
            raise LiquidTallyError("greedycap requires a cap")
        res = tally_greedycap(g, cap, seed, enum_limit=enum_limit, mc_trials=mc_trials)
        return MechanismRun("greedycap", res.sampled, distribution=res.distribution, greedycap=res)
    res = tally_fluid(g, enum_limit)
    return MechanismRun("fluid", res.canonical, fluid=res)
