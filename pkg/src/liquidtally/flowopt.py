"""Exact and heuristic solvers for min-max confluent delegation.

A :data:`Selection` assigns every delegable delegator exactly one approved
successor such that every induced chain terminates at a voter (confluence:
each agent forwards along at most one edge).  :func:`solve_exact` minimizes
the maximum voter power (own vote plus transitively received votes) by
branch and bound and can enumerate every optimal selection;
:func:`solve_greedy` is a fast feasible heuristic the audit compares
against the exact optimum.

Agents in components with no path to any voter are removed up front
(:func:`liquidtally.model.delegable_subgraph`), so feasibility is always
attainable for the residual graph.  Loads are whole votes; no fractional
flow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    LiquidTallyError,
    PreferenceGraph,
    WrongKindError,
    classify_kind,
    delegable_subgraph,
    PreferenceKind,
)

#: Map from delegating agent to its chosen successor.
Selection = dict[str, str]

DEFAULT_ENUM_LIMIT = 100_000

_CYCLE = "\x00cycle"


def _require_unranked(g: PreferenceGraph) -> None:
    if g.m and classify_kind(g) is PreferenceKind.MRP:
        raise WrongKindError("confluent-flow solving expects unranked preferences")


@dataclass(frozen=True)
class ExactFlowResult:
    """Optimum value plus every optimal selection (possibly truncated).

    ``selections`` is in lexicographic order by (agent, successor)
    assignments, so ``selections[0]`` is the canonical one.  ``truncated``
    flags that enumeration stopped at the limit; the optimum is exact
    regardless.
    """

    optimum: int
    selections: tuple[Selection, ...]
    truncated: bool


def _chain_loads(voters: set[str], succ: Selection) -> dict[str, int] | None:
    """Voter loads induced by the (possibly partial) selection.

    Chains ending at a not-yet-assigned agent contribute nothing yet;
    returns None when the assigned edges close a cycle (infeasible).
    """
    loads = dict.fromkeys(voters, 1)
    terminal: dict[str, str | None] = {}
    for a in succ:
        chain = []
        cur = a
        while True:
            if cur in terminal:
                t = terminal[cur]
                break
            if cur in voters:
                t = cur
                break
            if cur not in succ:
                t = None
                break
            chain.append(cur)
            terminal[cur] = _CYCLE  # marks "on the current walk"
            cur = succ[cur]
            if terminal.get(cur) is _CYCLE:
                t = _CYCLE
                break
        for node in chain:
            terminal[node] = t
        if t is _CYCLE:
            return None
        if t is not None:
            loads[t] += 1
    return loads


def solve_exact(g: PreferenceGraph, enum_limit: int = DEFAULT_ENUM_LIMIT) -> ExactFlowResult:
    """Minimize the maximum voter load over all feasible selections.

    Phase 1 finds the optimum by depth-first branch and bound: agents are
    branched in descending out-degree order, partial voter loads only ever
    grow, so the current maximum is a sound lower bound; the greedy
    heuristic seeds the incumbent.  Phase 2 re-enumerates, in lexicographic
    order, every selection achieving the optimum, stopping (and flagging)
    after ``enum_limit``.
    """
    if enum_limit < 1:
        raise ValueError("enum_limit must be positive")
    _require_unranked(g)
    dg = delegable_subgraph(g)
    voters = set(dg.votes)
    delegators = [a for a in dg.agents if a not in voters]
    if not delegators:
        return ExactFlowResult(1 if voters else 0, ({},), False)
    choices = {a: sorted({e.dst for e in dg.out_edges(a)}) for a in delegators}

    seed = solve_greedy(g)
    best = max_power(g, seed)

    order = sorted(delegators, key=lambda a: (-len(choices[a]), a))
    succ: Selection = {}

    def search(i: int) -> None:
        nonlocal best
        loads = _chain_loads(voters, succ)
        if loads is None or max(loads.values()) >= best:
            return
        if i == len(order):
            best = max(loads.values())  # strictly better than the incumbent
            return
        a = order[i]
        for b in choices[a]:
            succ[a] = b
            search(i + 1)
            del succ[a]

    search(0)

    lex_order = sorted(delegators)
    found: list[Selection] = []
    truncated = False

    def enumerate_opt(i: int) -> bool:
        nonlocal truncated
        loads = _chain_loads(voters, succ)
        if loads is None or max(loads.values()) > best:
            return True
        if i == len(lex_order):
            if len(found) == enum_limit:
                truncated = True
                return False
            found.append(dict(succ))
            return True
        for b in choices[lex_order[i]]:
            succ[lex_order[i]] = b
            keep_going = enumerate_opt(i + 1)
            del succ[lex_order[i]]
            if not keep_going:
                return False
        return True

    enumerate_opt(0)
    return ExactFlowResult(best, tuple(found), truncated)


def _completable(dg: PreferenceGraph, succ: Selection, delegators: list[str]) -> bool:
    """True if every delegator can still reach a voter once assigned edges are fixed."""
    allowed_rev: dict[str, list[str]] = {}
    for e in dg.edges:
        if e.src in succ and succ[e.src] != e.dst:
            continue
        allowed_rev.setdefault(e.dst, []).append(e.src)
    reached = set(dg.votes)
    stack = list(dg.votes)
    while stack:
        cur = stack.pop()
        for prev in allowed_rev.get(cur, ()):
            if prev not in reached:
                reached.add(prev)
                stack.append(prev)
    return all(a in reached for a in delegators)


def solve_greedy(g: PreferenceGraph) -> Selection:
    """Feasible selection built one delegator at a time, in lexicographic order.

    Each delegator takes the successor whose chain currently ends at the
    least-loaded voter (an unassigned tail counts as load 1, the floor any
    voter carries; ties go to the lexicographically smaller successor).
    Candidates that would strand some delegator away from every voter are
    skipped, which keeps the construction feasible; at least one candidate
    always survives that filter.
    """
    _require_unranked(g)
    dg = delegable_subgraph(g)
    voters = set(dg.votes)
    delegators = sorted(a for a in dg.agents if a not in voters)
    succ: Selection = {}
    for a in delegators:
        loads = _chain_loads(voters, succ)
        assert loads is not None
        pick: tuple[int, str] | None = None
        for b in sorted({e.dst for e in dg.out_edges(a)}):
            succ[a] = b
            if _completable(dg, succ, delegators):
                cur = b
                while cur not in voters and cur in succ:
                    cur = succ[cur]
                load = loads[cur] if cur in voters else 1
                if pick is None or (load, b) < pick:
                    pick = (load, b)
            del succ[a]
        assert pick is not None, "completable state must leave an escape"
        succ[a] = pick[1]
    return succ


def max_power(g: PreferenceGraph, s: Selection) -> int:
    """Maximum over voters of own vote plus votes routed to them by ``s``.

    Raises if the selection is infeasible (a chain cycles or dead-ends) or
    uses a non-edge.
    """
    approved = {(e.src, e.dst) for e in g.edges}
    for a, b in s.items():
        if (a, b) not in approved:
            raise LiquidTallyError(f"selection uses non-edge {a}->{b}")
        if g.is_voter(a):
            raise LiquidTallyError(f"voter {a} cannot delegate")
    voters = set(g.votes)
    loads = _chain_loads(voters, s)
    if loads is None:
        raise LiquidTallyError("selection is infeasible: assigned edges form a cycle")
    for a in s:
        cur = a
        while cur in s:
            cur = s[cur]
        if cur not in voters:
            raise LiquidTallyError(f"selection is infeasible: chain from {a} dead-ends at {cur}")
    return max(loads.values(), default=0)
