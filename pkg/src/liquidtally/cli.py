"""Command-line interface.

Subcommands: tally, audit, scenario, compare, fuzz, fixtures.  Exit codes:
0 success, 1 a property violation was found (audit/scenario/fuzz), 2 input
or usage error.  ``--format machine`` emits one JSON document with sorted
keys, byte-identical across runs of the same invocation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import audit, fixtures, gen
from .ldgfmt import LdgError, load_ldg
from .mechanisms import (
    DEFAULT_ENUM_LIMIT,
    DFD_PATH_GUARD,
    MECHANISMS,
    run_mechanism,
)
from .model import (
    LiquidTallyError,
    Outcome,
    PreferenceKind,
    WrongKindError,
    classify_kind,
    tally_from_routing,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def _env_seed() -> int:
    raw = os.environ.get("LIQUID_TALLY_SEED", "").strip()
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise LiquidTallyError(f"LIQUID_TALLY_SEED must be an integer, got {raw!r}") from None


def _emit(doc: dict, fmt: str, text: str) -> None:
    if fmt == "machine":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _routing_doc(routing) -> dict:
    routes = {}
    for a in routing.agents:
        p = routing.path(a)
        if p is not None:
            routes[a] = {"hops": list(p.hops), "terminal": p.terminal.value}
        elif a in routing.handoffs:
            routes[a] = {"handoff": routing.handoffs[a]}
        else:
            routes[a] = None
    doc = {"routes": routes}
    if routing.notes:
        doc["notes"] = dict(sorted(routing.notes.items()))
    return doc


def _routing_text(routing) -> list[str]:
    lines = []
    for a in routing.agents:
        p = routing.path(a)
        if p is not None:
            lines.append(f"route {a}: {p}")
        elif a in routing.handoffs:
            note = routing.notes.get(a, "")
            lines.append(f"route {a}: HANDOFF -> {routing.handoffs[a]} ({note})")
        else:
            note = routing.notes.get(a)
            lines.append(f"route {a}: UNRESOLVED" + (f" ({note})" if note else ""))
    return lines


def _tally_doc(g, routing) -> dict:
    tally = tally_from_routing(g, routing)
    return {
        "totals": {"yes": tally.totals[Outcome.YES], "no": tally.totals[Outcome.NO]},
        "unresolved": tally.unresolved_count,
        "power": dict(tally.power),
        "max_power": tally.max_power,
        "winner": str(tally.winner()) if tally.winner() else "tie",
    }


def cmd_tally(args: argparse.Namespace) -> int:
    g = load_ldg(args.input)
    run = run_mechanism(
        args.mechanism, g,
        cap=args.cap, seed=args.seed, enum_limit=args.enum_limit, path_guard=args.path_guard,
    )
    doc = {"command": "tally", "mechanism": args.mechanism, "kind": str(classify_kind(g))}
    doc.update(_routing_doc(run.routing))
    doc.update(_tally_doc(g, run.routing))
    lines = [f"mechanism: {args.mechanism} ({MECHANISMS[args.mechanism].display_name})"]
    lines += _routing_text(run.routing)
    tally = tally_from_routing(g, run.routing)
    lines.append(f"tally: {tally}")
    lines.append(f"winner: {doc['winner']}")
    power = " ".join(f"{v}={k}" for v, k in tally.power.items())
    lines.append(f"power: {power or 'none'} (max {tally.max_power})")
    if run.fluid is not None:
        fl = run.fluid
        doc["fluid"] = {
            "optimum": fl.optimum,
            "optima_count": len(fl.all_optima),
            "truncated": fl.truncated,
            "outcome_divergence": fl.outcome_divergence(g),
        }
        lines.append(f"fluid optimum: {fl.optimum}; optimal routings: {len(fl.all_optima)}"
                     + (" (truncated)" if fl.truncated else ""))
        if doc["fluid"]["outcome_divergence"]:
            lines.append("warning: optimal routings disagree on the winner "
                         "(arbitrary tie-break decides the outcome)")
    if run.greedycap is not None:
        gc = run.greedycap
        doc["greedycap"] = {
            "cap": gc.cap,
            "seed": gc.seed,
            "exact_distribution": gc.exact,
            "support_size": len(gc.distribution),
        }
        how = "exact" if gc.exact else "sampled"
        lines.append(f"greedycap: cap={gc.cap} seed={gc.seed} "
                     f"distribution={how} support={len(gc.distribution)}")
    _emit(doc, args.format, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    g = load_ldg(args.input)
    tokens = [t for t in args.properties.split(",") if t]
    verdicts = audit.audit_properties(
        args.mechanism, g, tokens, cap=args.cap, seed=args.seed, enum_limit=args.enum_limit
    )
    doc = {
        "command": "audit",
        "mechanism": args.mechanism,
        "properties": [v.as_dict() for v in verdicts],
        "violations": sum(1 for v in verdicts if v.violated),
    }
    lines = [f"audit: {args.mechanism} on {os.path.basename(args.input)}"]
    for v in verdicts:
        lines.append(f"  {v}")
        if v.witness:
            lines.append(f"    witness: {json.dumps(v.witness, sort_keys=True)}")
    _emit(doc, args.format, "\n".join(lines) + "\n")
    return EXIT_VIOLATION if doc["violations"] else EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    scenario = audit.Scenario(
        round1=load_ldg(args.round1),
        round2=load_ldg(args.round2),
        changed=args.changed,
        outcome=Outcome.parse(args.outcome),
    )
    verdict = audit.run_scenario(
        args.mechanism, scenario, cap=args.cap, seed=args.seed, enum_limit=args.enum_limit
    )
    doc = {"command": "scenario", "mechanism": args.mechanism, "verdict": verdict.as_dict()}
    lines = [
        f"scenario: {args.mechanism}, changed agent {args.changed} toward {args.outcome}",
        f"  {verdict}",
    ]
    if verdict.witness:
        lines.append(f"  shares: {verdict.witness.get('round1_share')} -> "
                     f"{verdict.witness.get('round2_share')}")
    _emit(doc, args.format, "\n".join(lines) + "\n")
    return EXIT_VIOLATION if verdict.violated else EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    g = load_ldg(args.input)
    rows = []
    winners = set()
    for mid in [m for m in args.mechanisms.split(",") if m]:
        if mid not in MECHANISMS:
            raise LiquidTallyError(f"unknown mechanism {mid!r}")
        try:
            run = run_mechanism(mid, g, cap=args.cap, seed=args.seed,
                                enum_limit=args.enum_limit, path_guard=args.path_guard)
        except WrongKindError as exc:
            rows.append({"mechanism": mid, "status": "not-applicable", "reason": str(exc)})
            continue
        tally = tally_from_routing(g, run.routing)
        winner = str(tally.winner()) if tally.winner() else "tie"
        winners.add(winner)
        rows.append({
            "mechanism": mid,
            "status": "ok",
            "totals": {"yes": tally.totals[Outcome.YES], "no": tally.totals[Outcome.NO]},
            "unresolved": tally.unresolved_count,
            "winner": winner,
            "max_power": tally.max_power,
        })
    doc = {"command": "compare", "rows": rows, "outcome_divergence": len(winners) > 1}
    lines = [f"compare on {os.path.basename(args.input)}"]
    for row in rows:
        if row["status"] != "ok":
            lines.append(f"  {row['mechanism']:<10} N/A ({row['reason']})")
        else:
            t = row["totals"]
            lines.append(
                f"  {row['mechanism']:<10} yes={t['yes']} no={t['no']} "
                f"unresolved={row['unresolved']} winner={row['winner']} "
                f"max_power={row['max_power']}"
            )
    if doc["outcome_divergence"]:
        lines.append("note: mechanisms disagree on the winner")
    _emit(doc, args.format, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    checks = [t for t in args.check.split(",") if t]
    kind = PreferenceKind(args.kind) if args.kind else None
    report = gen.fuzz_campaign(
        args.mechanism, checks, args.trials, args.seed,
        kind=kind, n_agents=args.agents, cap=args.cap,
    )
    doc = {"command": "fuzz", **report.as_dict()}
    lines = [
        f"fuzz: {report.mechanism} kind={report.kind} trials={report.trials} "
        f"checks={','.join(report.checks)}",
        f"violations: {len(report.violations)}",
    ]
    for v in report.violations:
        lines.append(f"  trial {v.trial} check {v.check}: {v.verdict}")
        lines.append("  minimized witness:")
        lines.extend("    " + line for line in v.minimized_ldg.splitlines())
    _emit(doc, args.format, "\n".join(lines) + "\n")
    return EXIT_VIOLATION if report.violations else EXIT_OK


def cmd_fixtures(args: argparse.Namespace) -> int:
    names = None if args.emit == "all" else (args.emit,)
    if names and names[0] not in fixtures.FIXTURE_NAMES:
        raise LiquidTallyError(
            f"unknown fixture {args.emit!r}; known: {', '.join(fixtures.FIXTURE_NAMES)} or all"
        )
    written = fixtures.write_fixture_files(args.dir, names)
    doc = {"command": "fixtures", "written": written}
    _emit(doc, args.format, "\n".join(f"wrote {p}" for p in written) + "\n")
    return EXIT_OK


def cmd_table1(args: argparse.Namespace) -> int:
    report = audit.table1_report(enum_limit=args.enum_limit)
    doc = {"command": "table1", **report.as_dict()}
    _emit(doc, args.format, report.to_text())
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, *, seed_default: int | None = None) -> None:
    p.add_argument("--cap", type=int, default=None, help="power cap (greedycap)")
    p.add_argument("--seed", type=int, default=seed_default,
                   help="random seed (default: LIQUID_TALLY_SEED or 0)")
    p.add_argument("--enum-limit", type=int, default=DEFAULT_ENUM_LIMIT, dest="enum_limit",
                   help="bound on enumerated delegations / random branches")
    p.add_argument("--path-guard", type=int, default=DFD_PATH_GUARD, dest="path_guard",
                   help="bound on simple-path enumeration work (dfd)")
    p.add_argument("--format", choices=("text", "machine"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liquid-tally",
        description="Tally delegative votes and audit delegation mechanisms",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)
    mechanisms = sorted(MECHANISMS)

    p = sub.add_parser("tally", help="run one mechanism on a .ldg preference graph")
    p.add_argument("--mechanism", required=True, choices=mechanisms)
    p.add_argument("--input", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_tally)

    p = sub.add_parser("audit", help="check properties of a mechanism on one graph")
    p.add_argument("--mechanism", required=True, choices=mechanisms)
    p.add_argument("--input", required=True)
    p.add_argument("--properties", required=True,
                   help="comma list: rtd,rttr,pe1,gre,lfe,sd,sdod,nad,cp,det")
    _add_common(p)
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("scenario", help="two-round local-predictability replay")
    p.add_argument("--mechanism", required=True, choices=mechanisms)
    p.add_argument("--round1", required=True)
    p.add_argument("--round2", required=True)
    p.add_argument("--changed", required=True)
    p.add_argument("--outcome", required=True, choices=("yes", "no"))
    _add_common(p)
    p.set_defaults(fn=cmd_scenario)

    p = sub.add_parser("compare", help="side-by-side tallies of several mechanisms")
    p.add_argument("--input", required=True)
    p.add_argument("--mechanisms", required=True, help="comma list of mechanism ids")
    _add_common(p)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("fuzz", help="property fuzzing over random graphs")
    p.add_argument("--mechanism", required=True, choices=mechanisms)
    p.add_argument("--kind", choices=("onp", "mrp", "mup"), default=None)
    p.add_argument("--agents", type=int, default=12)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--check", required=True,
                   help="comma list: rtd,rttr,pe1,gre,sd,sdod,nad,cp,det")
    _add_common(p)
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("fixtures", help="emit canonical .ldg fixture files")
    p.add_argument("--emit", required=True, help="fixture name or 'all'")
    p.add_argument("--dir", default=".")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(fn=cmd_fixtures)

    p = sub.add_parser("table1", help="regenerate the five-mechanism property matrix")
    _add_common(p)
    p.set_defaults(fn=cmd_table1)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is None and hasattr(args, "seed"):
            args.seed = _env_seed()
        return args.fn(args)
    except LdgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LiquidTallyError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
