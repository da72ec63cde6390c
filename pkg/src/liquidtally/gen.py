"""Seeded random graph and scenario generators, shrinking, and fuzz campaigns.

Everything here is deterministic under the configured seed.  About a
quarter of generated graphs are wired to contain at least one directed
delegation cycle, since cycle handling is the behavior most worth fuzzing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from . import audit
from .ldgfmt import serialize_ldg
from .mechanisms import MECHANISMS, run_mechanism
from .model import (
    Edge,
    LiquidTallyError,
    Outcome,
    PreferenceGraph,
    PreferenceKind,
    WrongKindError,
)

_CYCLE_BIAS = 0.25


@dataclass(frozen=True)
class GenConfig:
    """Shape parameters for one random preference graph."""

    kind: PreferenceKind
    n_agents: int
    voter_fraction: float = 0.3
    edge_density: float = 0.5
    max_out_degree: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.n_agents < 1:
            raise LiquidTallyError("n_agents must be positive")
        if not (0 < self.voter_fraction <= 1):
            raise LiquidTallyError("voter_fraction must be in (0, 1]")
        if not (0 <= self.edge_density <= 1):
            raise LiquidTallyError("edge_density must be in [0, 1]")
        if self.max_out_degree < 1:
            raise LiquidTallyError("max_out_degree must be positive")


def random_graph(cfg: GenConfig) -> PreferenceGraph:
    """Deterministic random graph of the requested kind.

    Voters get uniform outcomes; every non-voter delegates (out-degree 1
    for ONP, otherwise 1 plus density-weighted extras up to
    max_out_degree); ranked graphs get a fresh random rank permutation per
    agent.
    """
    rng = random.Random(cfg.seed)
    width = len(str(cfg.n_agents))
    ids = [f"a{i:0{width}d}" for i in range(1, cfg.n_agents + 1)]
    n_voters = max(1, round(cfg.voter_fraction * cfg.n_agents))
    voters = sorted(rng.sample(ids, min(n_voters, cfg.n_agents)))
    votes = {v: rng.choice((Outcome.YES, Outcome.NO)) for v in voters}
    delegators = [a for a in ids if a not in votes]

    cycle_members: list[str] = []
    if len(delegators) >= 2 and rng.random() < _CYCLE_BIAS:
        k = rng.randint(2, min(4, len(delegators)))
        cycle_members = rng.sample(delegators, k)

    edges: list[Edge] = []
    forced = {
        m: cycle_members[(i + 1) % len(cycle_members)]
        for i, m in enumerate(cycle_members)
    }
    for d in delegators:
        if cfg.kind is PreferenceKind.ONP:
            deg = 1
        else:
            extras = sum(rng.random() < cfg.edge_density for _ in range(cfg.max_out_degree - 1))
            deg = 1 + extras
        deg = min(deg, cfg.n_agents - 1)
        # rejection sampling keeps this linear in n even at 10^5+ agents
        targets: list[str] = []
        seen = {d}
        attempts = 0
        while len(targets) < deg and attempts < 20 + 8 * deg:
            attempts += 1
            t = ids[rng.randrange(cfg.n_agents)]
            if t in seen:
                continue
            seen.add(t)
            targets.append(t)
        if d in forced and forced[d] not in targets:
            targets[0] = forced[d]
        targets = list(dict.fromkeys(targets))
        if cfg.kind is PreferenceKind.MRP:
            ranks = list(range(1, len(targets) + 1))
            rng.shuffle(ranks)
            edges.extend(Edge(d, t, r) for t, r in zip(targets, ranks))
        else:
            edges.extend(Edge(d, t) for t in targets)
    return PreferenceGraph(agents=ids, edges=edges, votes=votes)


def onp_as_mrp(g: PreferenceGraph) -> PreferenceGraph:
    """Embed a one-choice unranked graph into the ranked kind (all ranks 1)."""
    return PreferenceGraph(
        agents=g.agents,
        edges=[Edge(e.src, e.dst, 1) for e in g.edges],
        votes=g.votes,
    )


def _default_mechanism(kind: PreferenceKind) -> str:
    return {
        PreferenceKind.ONP: "lf",
        PreferenceKind.MRP: "bfd",
        PreferenceKind.MUP: "fluid",
    }[kind]


def random_scenario(
    cfg: GenConfig,
    favor: Outcome,
    mechanism: str | None = None,
) -> audit.Scenario | None:
    """Two-round case whose change strictly favors ``favor``, or None.

    Builds round 1, rates every agent by where its vote went under the
    target mechanism, then looks for a delegator whose current targets all
    rate strictly below some fully-favoring replacement set.  Only
    deterministic mechanisms are targeted (ratings are then 0/1 shares).
    """
    mechanism = mechanism or _default_mechanism(cfg.kind)
    if MECHANISMS[mechanism].randomized:
        raise LiquidTallyError("scenario generation targets deterministic mechanisms")
    rng = random.Random(cfg.seed ^ 0x5CEA)
    g1 = random_graph(replace(cfg, seed=cfg.seed))
    try:
        routing = run_mechanism(mechanism, g1).routing
    except (WrongKindError, LiquidTallyError):
        return None
    rating: dict[str, int] = {}
    for a in g1.agents:
        t = routing.terminal(a)
        if t is not None:
            rating[a] = 1 if t == favor else 0
    candidates = [d for d in g1.agents if g1.out_edges(d)]
    rng.shuffle(candidates)
    for changed in candidates:
        targets = [e.dst for e in g1.out_edges(changed)]
        if any(t not in rating for t in targets):
            continue
        threshold = max(rating[t] for t in targets)
        if threshold == 1:
            continue
        pool = sorted(
            a for a in g1.agents
            if a != changed and rating.get(a) == 1
        )
        if not pool:
            continue
        size = 1 if cfg.kind is PreferenceKind.ONP else rng.randint(1, min(len(pool), cfg.max_out_degree))
        new_targets = rng.sample(pool, size)
        if cfg.kind is PreferenceKind.MRP:
            ranks = list(range(1, size + 1))
            rng.shuffle(ranks)
            new_edges = [Edge(changed, t, r) for t, r in zip(new_targets, ranks)]
        else:
            new_edges = [Edge(changed, t) for t in new_targets]
        g2 = g1.with_prefs(changed, edges=new_edges)
        return audit.Scenario(round1=g1, round2=g2, changed=changed, outcome=favor)
    return None


def shrink_graph(
    g: PreferenceGraph, still_failing: Callable[[PreferenceGraph], bool]
) -> PreferenceGraph:
    """Greedy witness minimization: drop agents, then edges, to a fixpoint.

    ``still_failing`` must return True when the candidate graph still
    exhibits the violation (and False on errors such as kind mismatch).
    """
    current = g
    changed = True
    while changed:
        changed = False
        for a in list(current.agents):
            if current.n == 1:
                break
            candidate = current.subgraph(set(current.agents) - {a})
            if _safe(still_failing, candidate):
                current = candidate
                changed = True
        for e in list(current.edges):
            candidate = PreferenceGraph(
                agents=current.agents,
                edges=[x for x in current.edges if x != e],
                votes=current.votes,
            )
            if _safe(still_failing, candidate):
                current = candidate
                changed = True
    return current


def _safe(pred: Callable[[PreferenceGraph], bool], g: PreferenceGraph) -> bool:
    try:
        return bool(pred(g))
    except LiquidTallyError:
        return False


@dataclass(frozen=True)
class FuzzViolation:
    trial: int
    check: str
    verdict: audit.PropertyVerdict
    witness_ldg: str
    minimized_ldg: str


@dataclass(frozen=True)
class FuzzReport:
    mechanism: str
    kind: str
    trials: int
    checks: tuple[str, ...]
    violations: tuple[FuzzViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "mechanism": self.mechanism,
            "kind": self.kind,
            "trials": self.trials,
            "checks": list(self.checks),
            "violations": [
                {
                    "trial": v.trial,
                    "check": v.check,
                    "verdict": v.verdict.as_dict(),
                    "witness_ldg": v.witness_ldg,
                    "minimized_ldg": v.minimized_ldg,
                }
                for v in self.violations
            ],
        }


def _first_violated(
    mechanism: str,
    g: PreferenceGraph,
    tokens: Sequence[str],
    cap: int | None,
    seed: int,
    enum_limit: int,
    mc_trials: int,
) -> tuple[str, audit.PropertyVerdict] | None:
    verdicts = audit.audit_properties(
        mechanism, g, tokens, cap=cap, seed=seed, enum_limit=enum_limit, mc_trials=mc_trials
    )
    for token, v in zip(tokens, verdicts):
        if v.verdict == audit.VIOLATED:
            return token, v
    return None


def fuzz_campaign(
    mechanism: str,
    checks: Sequence[str],
    trials: int,
    seed: int,
    *,
    kind: PreferenceKind | None = None,
    n_agents: int = 12,
    voter_fraction: float = 0.35,
    edge_density: float = 0.5,
    max_out_degree: int = 3,
    cap: int | None = None,
    enum_limit: int = 2000,
    mc_trials: int = 60,
    stop_on_first: bool = True,
) -> FuzzReport:
    """Run property checks over seeded random graphs; minimize any witness.

    One violation is enough to fail a campaign; the offending graph is
    shrunk by greedy agent/edge deletion while the violation persists.
    The enumeration limits default far lower than the CLI-facing ones:
    fuzz throughput matters more than exact distribution bookkeeping.
    """
    kind = kind or MECHANISMS[mechanism].preference_kind
    checks = tuple(checks)
    violations: list[FuzzViolation] = []
    for trial in range(trials):
        cfg = GenConfig(
            kind=kind,
            n_agents=n_agents,
            voter_fraction=voter_fraction,
            edge_density=edge_density,
            max_out_degree=max_out_degree,
            seed=seed + trial,
        )
        g = random_graph(cfg)
        trial_seed = seed + trial
        hit = _first_violated(mechanism, g, checks, cap, trial_seed, enum_limit, mc_trials)
        if hit is None:
            continue
        token, verdict = hit
        minimized = shrink_graph(
            g,
            lambda h: _first_violated(
                mechanism, h, (token,), cap, trial_seed, enum_limit, mc_trials
            ) is not None,
        )
        violations.append(
            FuzzViolation(
                trial=trial,
                check=token,
                verdict=verdict,
                witness_ldg=serialize_ldg(g),
                minimized_ldg=serialize_ldg(minimized),
            )
        )
        if stop_on_first:
            break
    return FuzzReport(mechanism, str(kind), trials, checks, tuple(violations))
