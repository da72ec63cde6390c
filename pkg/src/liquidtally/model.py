"""Core types for delegation preference graphs, vote routings and tallies.

A :class:`PreferenceGraph` records which agents are willing to delegate to
whom (optionally with per-agent ranks) and which agents cast a direct vote
on a binary issue.  A :class:`VoteRouting` records, for every agent, the
simple path its single originated vote travels to a voter (or that the vote
is unresolved).  :func:`tally_from_routing` turns a routing into per-outcome
totals and per-voter power.

The structural constructions shared by all mechanisms also live here:
:func:`classify_kind`, :func:`delegable_agents`, :func:`delegable_subgraph`
and :func:`top_rank_path`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

_AGENT_ID = re.compile(r"[A-Za-z0-9_]+\Z")


class LiquidTallyError(Exception):
    """Base class for every deliberate error raised by this package."""


class GraphInvariantError(LiquidTallyError):
    """A preference graph violates a structural invariant."""


class MixedRankingError(LiquidTallyError):
    """Some delegating agents rank their out-edges while others do not."""


class WrongKindError(LiquidTallyError):
    """An operation was applied to a graph of an incompatible preference kind."""


class NotDelegableError(LiquidTallyError):
    """The agent is not a delegating agent of the delegable subgraph."""


class RouteMismatchError(LiquidTallyError):
    """A routing does not structurally belong to the given graph."""


class Outcome(Enum):
    """One side of the binary issue."""

    YES = "yes"
    NO = "no"

    @classmethod
    def parse(cls, token: str) -> "Outcome":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise LiquidTallyError(f"unknown outcome {token!r}: expected yes or no") from None

    def __str__(self) -> str:
        return self.value


class PreferenceKind(Enum):
    """How delegating agents express their willingness to delegate.

    ONP: every delegating agent names exactly one unranked neighbor.
    MRP: every delegation edge carries a rank (1 = most preferred).
    MUP: unranked approval lists, possibly with out-degree above one.
    """

    ONP = "onp"
    MRP = "mrp"
    MUP = "mup"

    def __str__(self) -> str:
        return self.value.upper()


class Edge(NamedTuple):
    """A delegation willingness edge; ``rank`` is None for unranked edges."""

    src: str
    dst: str
    rank: int | None = None


def _check_agent_id(token: str) -> str:
    if not isinstance(token, str) or not _AGENT_ID.match(token):
        raise GraphInvariantError(
            f"invalid agent id {token!r}: letters, digits and underscore only"
        )
    return token


def _edge_sort_key(e: Edge) -> tuple[str, int, str]:
    return (e.src, e.rank if e.rank is not None else 0, e.dst)


class PreferenceGraph:
    """Immutable directed graph of delegation willingness plus direct votes.

    Agents referenced by ``edges`` or ``votes`` are declared implicitly;
    listing an agent in ``agents`` is only required for isolated abstainers.

    Invariants enforced at construction:

    * agent ids are nonempty ``[A-Za-z0-9_]`` tokens, unique per graph;
    * no self-loops and no duplicate ``(src, dst)`` pairs;
    * an agent either delegates (has out-edges) or votes or abstains,
      never both edges and a vote;
    * within one agent, out-edges are either all ranked or all unranked,
      and ranks are distinct positive integers (values need not be
      contiguous, only the relative order matters).
    """

    __slots__ = ("agents", "edges", "votes", "_out_map", "_pos", "_arrays",
                 "_has_ranked", "_has_unranked", "_multi_out")

    def __init__(
        self,
        agents: Iterable[str] = (),
        edges: Iterable[Edge | tuple] = (),
        votes: Mapping[str, Outcome | str] | None = None,
    ):
        norm_votes: dict[str, Outcome] = {}
        for a, o in dict(votes or {}).items():
            norm_votes[_check_agent_id(a)] = o if isinstance(o, Outcome) else Outcome.parse(o)

        norm_edges: list[Edge] = []
        for raw in edges:
            if isinstance(raw, Edge):
                e = raw
            elif len(raw) == 2:
                e = Edge(raw[0], raw[1], None)
            elif len(raw) == 3:
                e = Edge(raw[0], raw[1], raw[2])
            else:
                raise GraphInvariantError(f"bad edge tuple {raw!r}")
            _check_agent_id(e.src)
            _check_agent_id(e.dst)
            if e.rank is not None:
                if isinstance(e.rank, bool) or not isinstance(e.rank, int) or e.rank < 1:
                    raise GraphInvariantError(
                        f"edge {e.src}->{e.dst}: rank must be a positive integer, got {e.rank!r}"
                    )
            if e.src == e.dst:
                raise GraphInvariantError(f"self-loop on {e.src}")
            norm_edges.append(e)

        declared = {_check_agent_id(a) for a in agents}
        declared.update(norm_votes)
        seen_pairs: set[tuple[str, str]] = set()
        ranked_srcs: set[str] = set()
        unranked_srcs: set[str] = set()
        out_count: dict[str, int] = {}
        ranks_of: dict[str, set[int]] = {}
        for e in norm_edges:
            declared.add(e.src)
            declared.add(e.dst)
            pair = (e.src, e.dst)
            if pair in seen_pairs:
                raise GraphInvariantError(f"duplicate edge {e.src}->{e.dst}")
            seen_pairs.add(pair)
            out_count[e.src] = out_count.get(e.src, 0) + 1
            if e.rank is None:
                unranked_srcs.add(e.src)
            else:
                ranked_srcs.add(e.src)
                had = ranks_of.setdefault(e.src, set())
                if e.rank in had:
                    raise GraphInvariantError(f"agent {e.src}: duplicate rank {e.rank}")
                had.add(e.rank)
        mixed = ranked_srcs & unranked_srcs
        if mixed:
            raise GraphInvariantError(
                f"agent {sorted(mixed)[0]}: ranked and unranked out-edges mixed"
            )
        voting_delegators = out_count.keys() & norm_votes.keys()
        if voting_delegators:
            raise GraphInvariantError(
                f"agent {sorted(voting_delegators)[0]}: has both a direct vote and out-edges"
            )

        self.agents: tuple[str, ...] = tuple(sorted(declared))
        self.edges: tuple[Edge, ...] = tuple(sorted(norm_edges, key=_edge_sort_key))
        self.votes: dict[str, Outcome] = {a: norm_votes[a] for a in sorted(norm_votes)}
        self._out_map: dict[str, tuple[Edge, ...]] | None = None
        self._pos: dict[str, int] | None = None
        self._arrays: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
        self._has_ranked = bool(ranked_srcs)
        self._has_unranked = bool(unranked_srcs)
        self._multi_out = any(c > 1 for c in out_count.values())

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def voters(self) -> tuple[str, ...]:
        return tuple(self.votes)

    def is_voter(self, a: str) -> bool:
        return a in self.votes

    def vote_of(self, a: str) -> Outcome | None:
        return self.votes.get(a)

    def _ensure_out_map(self) -> dict[str, tuple[Edge, ...]]:
        if self._out_map is None:
            out: dict[str, list[Edge]] = {}
            for e in self.edges:  # edges are in canonical (src, rank, dst) order
                out.setdefault(e.src, []).append(e)
            self._out_map = {a: tuple(es) for a, es in out.items()}
        return self._out_map

    def out_edges(self, a: str) -> tuple[Edge, ...]:
        return self._ensure_out_map().get(a, ())

    def positions(self) -> dict[str, int]:
        """Agent id -> index in the sorted ``agents`` tuple (cached)."""
        if self._pos is None:
            self._pos = {a: i for i, a in enumerate(self.agents)}
        return self._pos

    def index_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edges as (src, dst, rank) int64 arrays in canonical order (cached).

        Unranked edges report rank 1.  This is the adjacency form the
        array kernels consume; building it once per graph keeps repeated
        tallies linear without re-walking the edge tuples.
        """
        if self._arrays is None:
            pos = self.positions()
            m = len(self.edges)
            esrc = np.fromiter((pos[e.src] for e in self.edges), np.int64, count=m)
            edst = np.fromiter((pos[e.dst] for e in self.edges), np.int64, count=m)
            erank = np.fromiter(
                (e.rank if e.rank is not None else 1 for e in self.edges), np.int64, count=m
            )
            self._arrays = (esrc, edst, erank)
        return self._arrays

    @property
    def delegators(self) -> tuple[str, ...]:
        out = self._ensure_out_map()
        return tuple(a for a in self.agents if a in out)

    @property
    def abstainers(self) -> tuple[str, ...]:
        out = self._ensure_out_map()
        return tuple(a for a in self.agents if a not in out and a not in self.votes)

    def subgraph(self, keep: Iterable[str]) -> "PreferenceGraph":
        """Graph restricted to ``keep``; edges touching removed agents are dropped."""
        kept = set(keep)
        unknown = kept - set(self.agents)
        if unknown:
            raise GraphInvariantError(f"unknown agent {sorted(unknown)[0]} in subgraph selection")
        return PreferenceGraph(
            agents=kept,
            edges=[e for e in self.edges if e.src in kept and e.dst in kept],
            votes={a: o for a, o in self.votes.items() if a in kept},
        )

    def with_prefs(
        self,
        agent: str,
        edges: Iterable[Edge | tuple] = (),
        vote: Outcome | str | None = None,
    ) -> "PreferenceGraph":
        """Copy of the graph with one agent's out-edges/vote replaced."""
        if agent not in self.agents:
            raise GraphInvariantError(f"unknown agent {agent}")
        new_edges = [e for e in self.edges if e.src != agent]
        for raw in edges:
            e = raw if isinstance(raw, Edge) else Edge(*raw) if len(raw) == 3 else Edge(raw[0], raw[1])
            if e.src != agent:
                raise GraphInvariantError(f"with_prefs: edge {e} does not start at {agent}")
            new_edges.append(e)
        new_votes = {a: o for a, o in self.votes.items() if a != agent}
        if vote is not None:
            new_votes[agent] = vote if isinstance(vote, Outcome) else Outcome.parse(vote)
        return PreferenceGraph(agents=self.agents, edges=new_edges, votes=new_votes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreferenceGraph):
            return NotImplemented
        return (
            self.agents == other.agents
            and self.edges == other.edges
            and self.votes == other.votes
        )

    __hash__ = None  # mutable-looking value type; use explicit keys for dedup

    def __repr__(self) -> str:
        return f"PreferenceGraph(n={self.n}, m={self.m}, voters={len(self.votes)})"


def classify_kind(g: PreferenceGraph) -> PreferenceKind:
    """Classify how the graph's delegators express preferences.

    Raises MixedRankingError when some delegating agents rank and others do
    not (per-agent consistency is already a graph invariant).  A graph with
    no delegation edges classifies as ONP.  O(1): the flags are collected
    during graph validation, since this sits on the tally hot path.
    """
    if g._has_ranked and g._has_unranked:
        raise MixedRankingError("some agents rank their out-edges and some do not")
    if g._has_ranked:
        return PreferenceKind.MRP
    if not g._multi_out:
        return PreferenceKind.ONP
    return PreferenceKind.MUP


def delegable_agents(g: PreferenceGraph) -> frozenset[str]:
    """Non-voter delegating agents with a directed path to some voter.

    Computed by reverse reachability from the voters.
    """
    rev: dict[str, list[str]] = {}
    for e in g.edges:
        rev.setdefault(e.dst, []).append(e.src)
    reached: set[str] = set(g.votes)
    stack = list(g.votes)
    while stack:
        cur = stack.pop()
        for prev in rev.get(cur, ()):
            if prev not in reached:
                reached.add(prev)
                stack.append(prev)
    return frozenset(reached - set(g.votes))


def delegable_subgraph(g: PreferenceGraph) -> PreferenceGraph:
    """Graph restricted to voters plus delegable agents.

    Edges into removed agents are dropped; surviving edges keep their
    original rank values, so per-agent rank order is preserved.
    """
    return g.subgraph(delegable_agents(g) | set(g.votes))


@dataclass(frozen=True)
class VotePath:
    """A simple path from ``origin`` along delegation edges to a voter.

    ``hops`` excludes the origin; for a voter's own zero-hop route it is
    empty and ``terminal`` equals the declared vote.  All agents before the
    final one are non-voters.
    """

    origin: str
    hops: tuple[str, ...]
    terminal: Outcome

    @property
    def final_agent(self) -> str:
        return self.hops[-1] if self.hops else self.origin

    @property
    def nodes(self) -> tuple[str, ...]:
        return (self.origin, *self.hops)

    def edge_pairs(self) -> tuple[tuple[str, str], ...]:
        ns = self.nodes
        return tuple(zip(ns, ns[1:]))

    def __str__(self) -> str:
        chain = " -> ".join(self.nodes)
        return f"{chain} => {self.terminal}"


def top_rank_path(g: PreferenceGraph, a: str) -> VotePath | None:
    """Follow minimal-rank surviving out-edges from ``a`` in the delegable subgraph.

    Returns the resulting path if it reaches a voter and None if the walk
    enters a cycle.  The walk is deterministic because one agent's ranks are
    distinct, and any returned path is necessarily simple.
    """
    dg = delegable_subgraph(g)
    if a not in dg.agents or dg.is_voter(a):
        raise NotDelegableError(f"{a} is not a delegating agent of the delegable subgraph")
    hops: list[str] = []
    seen = {a}
    cur = a
    while True:
        edges = dg.out_edges(cur)
        if any(e.rank is None for e in edges):
            raise WrongKindError(f"agent {cur} has unranked out-edges; top-rank walk needs ranks")
        nxt = min(edges, key=lambda e: e.rank).dst
        if nxt in seen:
            return None
        hops.append(nxt)
        seen.add(nxt)
        if dg.is_voter(nxt):
            return VotePath(a, tuple(hops), dg.votes[nxt])
        cur = nxt


class VoteRouting:
    """Per-agent resolution of where each originated vote travels.

    Entries map every agent of the graph to a :class:`VotePath` or to
    ``None`` (unresolved).  ``handoffs`` records one-hop delegations whose
    target holds the vote without casting it (the target is itself
    unresolved); ``notes`` carries per-agent diagnostic labels for display.

    Internally a routing is backed either by explicit paths or, for
    confluent mechanisms on large graphs, by successor/terminal arrays from
    which paths are rebuilt on demand.  The array form keeps tallying O(n)
    even when explicit per-agent paths would take quadratic space.
    """

    __slots__ = ("_ids", "_paths", "_next", "_final", "_ocode", "_pos", "handoffs", "notes")

    def __init__(
        self,
        paths: Mapping[str, VotePath | None],
        *,
        handoffs: Mapping[str, str] | None = None,
        notes: Mapping[str, str] | None = None,
    ):
        self._ids: tuple[str, ...] = tuple(sorted(paths))
        self._paths: dict[str, VotePath | None] | None = {a: paths[a] for a in self._ids}
        self._next = self._final = self._ocode = None
        self._pos: dict[str, int] | None = None
        self.handoffs = dict(handoffs or {})
        self.notes = dict(notes or {})
        for a, p in self._paths.items():
            if p is not None and p.origin != a:
                raise RouteMismatchError(f"route for {a} starts at {p.origin}")
        for a, tgt in self.handoffs.items():
            if a not in self._paths or self._paths[a] is not None:
                raise RouteMismatchError(f"handoff recorded for resolved or unknown agent {a}")
            if tgt not in self._paths:
                raise RouteMismatchError(f"handoff target {tgt} is not an agent")

    @classmethod
    def from_arrays(
        cls,
        ids: Sequence[str],
        next_idx: np.ndarray,
        final_idx: np.ndarray,
        outcome_code: np.ndarray,
        *,
        notes: Mapping[str, str] | None = None,
    ) -> "VoteRouting":
        """Successor-backed routing: ``next_idx``/``final_idx`` are -1 where absent,
        ``outcome_code`` is -1 unresolved / 0 NO / 1 YES per agent."""
        self = object.__new__(cls)
        self._ids = tuple(ids)
        self._paths = None
        self._next = np.asarray(next_idx, dtype=np.int64)
        self._final = np.asarray(final_idx, dtype=np.int64)
        self._ocode = np.asarray(outcome_code, dtype=np.int8)
        self._pos = None
        self.handoffs = {}
        self.notes = dict(notes or {})
        return self

    @classmethod
    def from_successors(cls, g: PreferenceGraph, succ: Mapping[str, str]) -> "VoteRouting":
        """Routing induced by a successor choice per delegating agent.

        Voters resolve to themselves; agents outside ``succ`` (and agents
        whose successor chain dead-ends or cycles) are unresolved.
        Desk-scale: materializes explicit paths.
        """
        approved = {(e.src, e.dst) for e in g.edges}
        for a, b in succ.items():
            if (a, b) not in approved:
                raise RouteMismatchError(f"successor {a}->{b} is not an edge of the graph")
        terminal: dict[str, str | None] = {}

        def resolve(start: str) -> str | None:
            chain = []
            cur = start
            on_chain = set()
            while True:
                if cur in terminal:
                    t = terminal[cur]
                    break
                if g.is_voter(cur):
                    t = cur
                    break
                if cur not in succ or cur in on_chain:
                    t = None
                    break
                chain.append(cur)
                on_chain.add(cur)
                cur = succ[cur]
            for node in chain:
                terminal[node] = t
            return t

        paths: dict[str, VotePath | None] = {}
        for a in g.agents:
            if g.is_voter(a):
                paths[a] = VotePath(a, (), g.votes[a])
                continue
            t = resolve(a)
            if t is None:
                paths[a] = None
                continue
            hops = []
            cur = a
            while not g.is_voter(cur):
                cur = succ[cur]
                hops.append(cur)
            paths[a] = VotePath(a, tuple(hops), g.votes[t])
        return cls(paths)

    @property
    def agents(self) -> tuple[str, ...]:
        return self._ids

    def _index_of(self, a: str) -> int:
        if self._pos is None:
            self._pos = {x: i for i, x in enumerate(self._ids)}
        try:
            return self._pos[a]
        except KeyError:
            raise RouteMismatchError(f"unknown agent {a}") from None

    def resolved(self, a: str) -> bool:
        if self._paths is not None:
            return self._paths[a] is not None
        return self._ocode[self._index_of(a)] >= 0

    def terminal(self, a: str) -> Outcome | None:
        if self._paths is not None:
            p = self._paths[a]
            return p.terminal if p else None
        code = self._ocode[self._index_of(a)]
        if code < 0:
            return None
        return Outcome.YES if code == 1 else Outcome.NO

    def final_voter(self, a: str) -> str | None:
        if self._paths is not None:
            p = self._paths[a]
            return p.final_agent if p else None
        i = self._index_of(a)
        if self._ocode[i] < 0:
            return None
        return self._ids[int(self._final[i])]

    def path(self, a: str) -> VotePath | None:
        if self._paths is not None:
            return self._paths[a]
        i = self._index_of(a)
        if self._ocode[i] < 0:
            return None
        hops = []
        cur = i
        while self._next[cur] >= 0:
            cur = int(self._next[cur])
            hops.append(self._ids[cur])
        return VotePath(a, tuple(hops), self.terminal(a))

    @property
    def routes(self) -> dict[str, VotePath | None]:
        return {a: self.path(a) for a in self._ids}

    def items(self) -> Iterator[tuple[str, VotePath | None]]:
        for a in self._ids:
            yield a, self.path(a)

    def unresolved_agents(self) -> tuple[str, ...]:
        return tuple(a for a in self._ids if not self.resolved(a))

    def used_edges(self) -> set[tuple[str, str]]:
        """Delegation edges traversed by at least one resolved vote path."""
        if self._paths is None:
            used = set()
            resolved = self._ocode >= 0
            for i in np.flatnonzero(resolved):
                j = self._next[i]
                if j >= 0:
                    used.add((self._ids[i], self._ids[int(j)]))
            return used
        used = set()
        for p in self._paths.values():
            if p is not None:
                used.update(p.edge_pairs())
        return used

    def canonical_key(self) -> tuple:
        """Hashable identity of the routing, for dedup and equality."""
        entries = []
        for a in self._ids:
            p = self.path(a)
            if p is not None:
                entries.append((a, "path", p.hops, p.terminal.value))
            elif a in self.handoffs:
                entries.append((a, "handoff", self.handoffs[a]))
            else:
                entries.append((a, "unresolved"))
        return tuple(entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VoteRouting):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    __hash__ = None

    def __repr__(self) -> str:
        unresolved = len(self.unresolved_agents())
        return f"VoteRouting(agents={len(self._ids)}, unresolved={unresolved})"


@dataclass(frozen=True)
class TallyResult:
    """Vote totals per outcome plus the power of every voter.

    ``power[v]`` counts the votes voter ``v`` casts, its own included;
    non-voters implicitly hold power 0.  ``totals`` plus
    ``unresolved_count`` partition the agents.
    """

    totals: Mapping[Outcome, int]
    power: Mapping[str, int]
    unresolved_count: int

    @property
    def cast(self) -> int:
        return sum(self.totals.values())

    @property
    def max_power(self) -> int:
        return max(self.power.values(), default=0)

    def winner(self) -> Outcome | None:
        yes, no = self.totals[Outcome.YES], self.totals[Outcome.NO]
        if yes == no:
            return None
        return Outcome.YES if yes > no else Outcome.NO

    def __str__(self) -> str:
        return (
            f"yes={self.totals[Outcome.YES]} no={self.totals[Outcome.NO]} "
            f"unresolved={self.unresolved_count}"
        )


def tally_from_routing(g: PreferenceGraph, r: VoteRouting) -> TallyResult:
    """Count one vote per resolved route toward its terminal outcome.

    Every resolved route also adds one to the power of the voter at the end
    of its path.  Explicit-path routings are checked hop-by-hop against the
    graph's edges; array-backed routings (built by the mechanisms from the
    graph itself) get vectorized coverage and terminal-consistency checks,
    full path verification being :func:`verify_routing`'s job.
    """
    if r.agents is not g.agents and r.agents != g.agents:
        raise RouteMismatchError("routing does not cover exactly the graph's agents")
    totals = {Outcome.YES: 0, Outcome.NO: 0}
    power: dict[str, int] = {}
    unresolved = 0

    if r._paths is None:
        ocode = r._ocode
        final = r._final
        n = len(r.agents)
        voter_code = np.full(n, -1, dtype=np.int8)
        pos = g.positions()
        for a, o in g.votes.items():
            voter_code[pos[a]] = 1 if o is Outcome.YES else 0
        resolved_mask = ocode >= 0
        safe_final = np.where(final >= 0, final, 0)
        ok = np.all(voter_code[safe_final][resolved_mask] == ocode[resolved_mask])
        if not ok or np.any(final[resolved_mask] < 0):
            raise RouteMismatchError("routing terminal disagrees with the declared votes")
        totals[Outcome.YES] = int(np.count_nonzero(ocode == 1))
        totals[Outcome.NO] = int(np.count_nonzero(ocode == 0))
        unresolved = n - totals[Outcome.YES] - totals[Outcome.NO]
        if n:
            counts = np.bincount(final[resolved_mask], minlength=n)
            for i in np.flatnonzero(counts):
                power[r.agents[int(i)]] = int(counts[i])
    else:
        edge_pairs = {(e.src, e.dst) for e in g.edges}
        for a in r.agents:
            p = r.path(a)
            if p is None:
                unresolved += 1
                continue
            for pair in p.edge_pairs():
                if pair not in edge_pairs:
                    raise RouteMismatchError(
                        f"route of {a} uses non-existent edge {pair[0]}->{pair[1]}"
                    )
            fin = p.final_agent
            if g.vote_of(fin) != p.terminal:
                raise RouteMismatchError(f"route of {a} ends at {fin} with a mismatched outcome")
            totals[p.terminal] += 1
            power[fin] = power.get(fin, 0) + 1

    result = TallyResult(totals=totals, power=dict(sorted(power.items())), unresolved_count=unresolved)
    assert result.cast + result.unresolved_count == g.n
    assert sum(result.power.values()) == result.cast
    return result


@dataclass(frozen=True)
class RoutingViolation:
    """One structural defect found by :func:`verify_routing`."""

    kind: str
    agent: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}({self.agent}): {self.detail}"


def verify_routing(g: PreferenceGraph, r: VoteRouting) -> list[RoutingViolation]:
    """Check every routing invariant against the graph; never raises.

    Returns the (possibly empty) list of violations: coverage, simple
    paths, edge existence, non-voter intermediates, terminal agreement,
    voter zero-hop routes, unresolved edge-less abstainers, and handoff
    sanity.  Materializes paths, so intended for desk-scale routings.
    """
    violations: list[RoutingViolation] = []
    missing = set(g.agents) - set(r.agents)
    extra = set(r.agents) - set(g.agents)
    for a in sorted(missing):
        violations.append(RoutingViolation("CoverageViolation", a, "agent has no route entry"))
    for a in sorted(extra):
        violations.append(RoutingViolation("CoverageViolation", a, "route for unknown agent"))
    edge_pairs = {(e.src, e.dst) for e in g.edges}

    for a in r.agents:
        if a not in g.agents:
            continue
        p = r.path(a)
        if p is None:
            if g.is_voter(a):
                violations.append(
                    RoutingViolation("VoterRouteViolation", a, "voter must resolve to itself")
                )
            continue
        if p.origin != a:
            violations.append(RoutingViolation("OriginViolation", a, f"path starts at {p.origin}"))
            continue
        nodes = p.nodes
        if len(set(nodes)) != len(nodes):
            violations.append(RoutingViolation("SimplePathViolation", a, "path repeats an agent"))
        for u, v in p.edge_pairs():
            if (u, v) not in edge_pairs:
                violations.append(RoutingViolation("EdgeViolation", a, f"no edge {u}->{v}"))
        for mid in nodes[:-1]:
            if g.is_voter(mid):
                violations.append(
                    RoutingViolation("IntermediateVoterViolation", a, f"{mid} votes directly")
                )
        fin = p.final_agent
        if not g.is_voter(fin):
            violations.append(RoutingViolation("TerminalViolation", a, f"{fin} is not a voter"))
        elif g.votes[fin] != p.terminal:
            violations.append(
                RoutingViolation("TerminalViolation", a, f"{fin} voted {g.votes[fin]}, path says {p.terminal}")
            )
        if g.is_voter(a) and p.hops:
            violations.append(
                RoutingViolation("VoterRouteViolation", a, "voter routed away from itself")
            )
        if not g.is_voter(a) and not g.out_edges(a):
            violations.append(
                RoutingViolation("AbstainerViolation", a, "abstainer without out-edges resolved")
            )
    for a, tgt in sorted(r.handoffs.items()):
        if (a, tgt) not in edge_pairs:
            violations.append(RoutingViolation("HandoffViolation", a, f"no edge {a}->{tgt}"))
        elif g.is_voter(tgt):
            violations.append(
                RoutingViolation("HandoffViolation", a, f"handoff target {tgt} is a voter")
            )
    return violations
