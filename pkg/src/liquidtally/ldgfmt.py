"""Line-oriented text format (``.ldg``) for preference graphs.

One directive per line, ``#`` starts a comment::

    agent <id>
    edge <src> <dst> [<rank>]
    vote <id> <yes|no>

Ids appearing in ``edge``/``vote`` lines are declared implicitly; explicit
``agent`` lines are only needed for isolated abstainers.  Canonical output
is UTF-8 with LF line endings: all ``agent`` lines, then all ``edge``
lines, then all ``vote`` lines, each block sorted, so equal graphs
serialize byte-identically and ``parse(serialize(g)) == g``.
"""

from __future__ import annotations

import os
import re

from .model import Edge, LiquidTallyError, Outcome, PreferenceGraph

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")


class LdgError(LiquidTallyError):
    """Parse failure; ``line`` is the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class LdgSyntaxError(LdgError):
    pass


class DuplicateEdgeError(LdgError):
    pass


class RankMixingError(LdgError):
    pass


class VoteAndDelegateError(LdgError):
    pass


def parse_ldg(text: str) -> PreferenceGraph:
    """Parse an LDG document, validating all graph invariants.

    Raises LdgSyntaxError / DuplicateEdgeError / RankMixingError /
    VoteAndDelegateError with line-accurate positions; anything the line
    scanner cannot see (there should be nothing) would surface as a
    GraphInvariantError from graph construction.
    """
    agents: set[str] = set()
    edges: list[Edge] = []
    seen_pairs: set[tuple[str, str]] = set()
    votes: dict[str, Outcome] = {}
    rank_mode: dict[str, bool] = {}  # src -> True if its edges are ranked
    ranks_used: dict[str, set[int]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        directive, args = fields[0], fields[1:]
        if directive == "agent":
            if len(args) != 1:
                raise LdgSyntaxError("agent takes exactly one id", lineno)
            agents.add(_ident(args[0], lineno))
        elif directive == "edge":
            if len(args) not in (2, 3):
                raise LdgSyntaxError("edge takes <src> <dst> [<rank>]", lineno)
            src = _ident(args[0], lineno)
            dst = _ident(args[1], lineno)
            if src == dst:
                raise LdgSyntaxError(f"self-loop on {src}", lineno)
            rank: int | None = None
            if len(args) == 3:
                try:
                    rank = int(args[2])
                except ValueError:
                    raise LdgSyntaxError(f"rank must be an integer, got {args[2]!r}", lineno) from None
                if rank < 1:
                    raise LdgSyntaxError(f"rank must be positive, got {rank}", lineno)
            if (src, dst) in seen_pairs:
                raise DuplicateEdgeError(f"duplicate edge {src} -> {dst}", lineno)
            seen_pairs.add((src, dst))
            ranked = rank is not None
            if src in rank_mode and rank_mode[src] != ranked:
                raise RankMixingError(f"agent {src} mixes ranked and unranked edges", lineno)
            rank_mode[src] = ranked
            if ranked:
                used = ranks_used.setdefault(src, set())
                if rank in used:
                    raise LdgSyntaxError(f"agent {src} repeats rank {rank}", lineno)
                used.add(rank)
            if src in votes:
                raise VoteAndDelegateError(f"agent {src} already voted", lineno)
            edges.append(Edge(src, dst, rank))
            agents.add(src)
            agents.add(dst)
        elif directive == "vote":
            if len(args) != 2:
                raise LdgSyntaxError("vote takes <id> <yes|no>", lineno)
            who = _ident(args[0], lineno)
            if args[1].lower() not in ("yes", "no"):
                raise LdgSyntaxError(f"vote must be yes or no, got {args[1]!r}", lineno)
            if who in votes:
                raise LdgSyntaxError(f"duplicate vote for {who}", lineno)
            if who in rank_mode:
                raise VoteAndDelegateError(f"agent {who} already delegates", lineno)
            votes[who] = Outcome.parse(args[1])
            agents.add(who)
        else:
            raise LdgSyntaxError(f"unknown directive {directive!r}", lineno)

    return PreferenceGraph(agents=agents, edges=edges, votes=votes)


def _ident(token: str, lineno: int) -> str:
    if not _IDENT.match(token):
        raise LdgSyntaxError(f"invalid agent id {token!r}", lineno)
    return token


def serialize_ldg(g: PreferenceGraph) -> str:
    """Canonical LDG text for a graph; the empty graph is the empty document."""
    lines = [f"agent {a}" for a in g.agents]
    for e in g.edges:  # already in canonical (src, rank, dst) order
        if e.rank is None:
            lines.append(f"edge {e.src} {e.dst}")
        else:
            lines.append(f"edge {e.src} {e.dst} {e.rank}")
    lines.extend(f"vote {a} {o}" for a, o in g.votes.items())
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def load_ldg(path: str | os.PathLike) -> PreferenceGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ldg(fh.read())


def dump_ldg(g: PreferenceGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_ldg(g))
