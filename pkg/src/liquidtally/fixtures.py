"""Canonical graphs with bound expectations, emitted as stable .ldg files.

Fixture names are stable tokens used by the CLI and the test suite:

* ``fig1``: three-agent delegation cycle, no voters;
* ``fig2``: ranked, with a rank-1 triangle among a1,a2,a3 and rank-2
  escape edges to the voters a4 (yes), a5 (yes), a6 (no);
* ``fig3``: a1 approves two voters that disagree (arbitrariness witness);
* ``fig4a``/``fig4b``: seven agents; the b variant differs only in a1's
  preference and flips the winner (two-round predictability witness);
* ``thm31_pair``: one delegator, one voter; any power cap below 2 blocks
  the delegation;
* ``bfd_rttr_witness``: shortest path disagrees with the top-rank path;
* ``dfd2_rttr_witness``: shortest-from-top-choice disagrees with the
  top-rank path;
* ``greedycap_star``: three agents approving one voter.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Mapping

from .audit import Scenario, check_psi_pe, check_rtd, check_rttr
from .ldgfmt import dump_ldg
from .mechanisms import run_mechanism
from .model import (
    LiquidTallyError,
    Outcome,
    PreferenceGraph,
    tally_from_routing,
)


class UnknownFixtureError(LiquidTallyError):
    pass


FIXTURE_NAMES = (
    "fig1",
    "fig2",
    "fig3",
    "fig4a",
    "fig4b",
    "thm31_pair",
    "bfd_rttr_witness",
    "dfd2_rttr_witness",
    "greedycap_star",
)


@dataclass(frozen=True)
class Expectation:
    """One replayable assertion bound to a fixture.

    ``kind`` selects the replay rule; ``params`` carries the expected
    values plus any mechanism parameters (cap, seed, approach).
    """

    mechanism: str
    kind: str
    params: Mapping


@dataclass(frozen=True)
class Fixture:
    name: str
    graph: PreferenceGraph
    expectations: tuple[Expectation, ...]


def _graphs() -> dict[str, PreferenceGraph]:
    return {
        "fig1": PreferenceGraph(edges=[("a1", "a2"), ("a2", "a3"), ("a3", "a1")]),
        "fig2": PreferenceGraph(
            edges=[
                ("a1", "a2", 1), ("a1", "a4", 2),
                ("a2", "a3", 1), ("a2", "a6", 2),
                ("a3", "a1", 1), ("a3", "a5", 2),
            ],
            votes={"a4": "yes", "a5": "yes", "a6": "no"},
        ),
        "fig3": PreferenceGraph(
            edges=[("a1", "a2"), ("a1", "a3")],
            votes={"a2": "yes", "a3": "no"},
        ),
        "fig4a": PreferenceGraph(
            edges=[("a5", "a1"), ("a1", "a2"), ("a3", "a2"), ("a3", "a7"), ("a6", "a7")],
            votes={"a2": "yes", "a4": "no", "a7": "no"},
        ),
        "fig4b": PreferenceGraph(
            edges=[("a5", "a1"), ("a1", "a3"), ("a3", "a2"), ("a3", "a7"), ("a6", "a7")],
            votes={"a2": "yes", "a4": "no", "a7": "no"},
        ),
        "thm31_pair": PreferenceGraph(edges=[("a1", "a2")], votes={"a2": "yes"}),
        "bfd_rttr_witness": PreferenceGraph(
            edges=[("a1", "a2", 1), ("a1", "v1", 2), ("a2", "v2", 1)],
            votes={"v1": "yes", "v2": "no"},
        ),
        "dfd2_rttr_witness": PreferenceGraph(
            edges=[("a1", "a2", 1), ("a2", "a3", 1), ("a2", "v2", 2), ("a3", "v3", 1)],
            votes={"v2": "no", "v3": "yes"},
        ),
        "greedycap_star": PreferenceGraph(
            edges=[("a1", "v"), ("a2", "v"), ("a3", "v")],
            votes={"v": "yes"},
        ),
    }


_EXPECTATIONS: dict[str, tuple[Expectation, ...]] = {
    "fig1": (
        Expectation("lf", "totals", {"yes": 0, "no": 0, "unresolved": 3}),
        Expectation("lf", "all_unresolved", {}),
    ),
    "fig2": (
        Expectation("bfd", "route", {"agent": "a1", "hops": ["a4"], "terminal": "yes"}),
        Expectation("bfd", "totals", {"yes": 4, "no": 2, "unresolved": 0}),
        Expectation("dfd1", "route", {"agent": "a1", "hops": ["a2", "a3", "a5"], "terminal": "yes"}),
        Expectation("dfd1", "route", {"agent": "a2", "hops": ["a3", "a1", "a4"], "terminal": "yes"}),
        Expectation("dfd1", "route", {"agent": "a3", "hops": ["a1", "a2", "a6"], "terminal": "no"}),
        Expectation("dfd1", "totals", {"yes": 4, "no": 2, "unresolved": 0}),
        Expectation("dfd2", "route", {"agent": "a1", "hops": ["a2", "a6"], "terminal": "no"}),
        Expectation("dfd2", "route", {"agent": "a2", "hops": ["a3", "a5"], "terminal": "yes"}),
        Expectation("dfd2", "route", {"agent": "a3", "hops": ["a1", "a4"], "terminal": "yes"}),
        Expectation("dfd2", "totals", {"yes": 4, "no": 2, "unresolved": 0}),
        Expectation("dfd1", "verdict", {"check": "pe1", "verdict": "VIOLATED"}),
        Expectation("dfd2", "verdict", {"check": "pe1", "verdict": "VIOLATED"}),
        Expectation("dfd1", "verdict", {"check": "rttr", "verdict": "VACUOUS"}),
        Expectation("bfd", "verdict", {"check": "pe1", "verdict": "SATISFIED"}),
    ),
    "fig3": (
        Expectation("fluid", "fluid_optimum", {"optimum": 2, "optima_count": 2}),
        Expectation("fluid", "fluid_outcomes_differ", {}),
    ),
    "fig4a": (
        Expectation("fluid", "totals", {"yes": 3, "no": 4, "unresolved": 0}),
        Expectation("fluid", "fluid_optimum", {"optimum": 3, "optima_count": 1}),
        Expectation("fluid", "verdict", {"check": "rtd", "verdict": "SATISFIED"}),
    ),
    "fig4b": (
        Expectation("fluid", "totals", {"yes": 4, "no": 3, "unresolved": 0}),
        Expectation("fluid", "fluid_optimum", {"optimum": 4, "optima_count": 1}),
    ),
    "thm31_pair": (
        Expectation("greedycap", "verdict", {"check": "rtd", "verdict": "VIOLATED", "cap": 1}),
    ),
    "bfd_rttr_witness": (
        Expectation("bfd", "route", {"agent": "a1", "hops": ["v1"], "terminal": "yes"}),
        Expectation("bfd", "verdict", {"check": "rttr", "verdict": "VIOLATED"}),
        Expectation("dfd1", "verdict", {"check": "rttr", "verdict": "SATISFIED"}),
    ),
    "dfd2_rttr_witness": (
        Expectation("dfd2", "route", {"agent": "a1", "hops": ["a2", "v2"], "terminal": "no"}),
        Expectation("dfd2", "verdict", {"check": "rttr", "verdict": "VIOLATED"}),
        Expectation("dfd1", "route", {"agent": "a1", "hops": ["a2", "a3", "v3"], "terminal": "yes"}),
        Expectation("dfd1", "verdict", {"check": "rttr", "verdict": "SATISFIED"}),
    ),
    "greedycap_star": (
        Expectation("greedycap", "totals", {"yes": 4, "no": 0, "unresolved": 0, "cap": 4}),
        Expectation("greedycap", "power_max", {"cap": 4, "max_power": 4}),
        Expectation("greedycap", "distribution", {"cap": 3, "support": 3, "probability": "1/3"}),
        Expectation("greedycap", "power_cap_holds", {"cap": 3}),
    ),
}


def fixture(name: str) -> Fixture:
    graphs = _graphs()
    if name not in graphs:
        raise UnknownFixtureError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    return Fixture(name, graphs[name], _EXPECTATIONS.get(name, ()))


def fixture_graph(name: str) -> PreferenceGraph:
    return fixture(name).graph


def fig4_scenario() -> Scenario:
    """The two-round predictability case: a1 turns toward a no-voting chain."""
    return Scenario(
        round1=fixture_graph("fig4a"),
        round2=fixture_graph("fig4b"),
        changed="a1",
        outcome=Outcome.NO,
    )


def replay_expectation(fx: Fixture, e: Expectation, seed: int = 0) -> tuple[bool, str]:
    """Re-run the bound mechanism and compare against the expectation."""
    cap = e.params.get("cap")
    run = run_mechanism(e.mechanism, fx.graph, cap=cap, seed=seed)
    if e.kind == "totals":
        tally = tally_from_routing(fx.graph, run.routing)
        got = {
            "yes": tally.totals[Outcome.YES],
            "no": tally.totals[Outcome.NO],
            "unresolved": tally.unresolved_count,
        }
        want = {k: e.params[k] for k in ("yes", "no", "unresolved")}
        return got == want, f"totals {got} vs expected {want}"
    if e.kind == "all_unresolved":
        bad = [a for a in run.routing.agents if run.routing.resolved(a)]
        return not bad, f"resolved agents: {bad}"
    if e.kind == "route":
        p = run.routing.path(e.params["agent"])
        ok = (
            p is not None
            and list(p.hops) == list(e.params["hops"])
            and p.terminal.value == e.params["terminal"]
        )
        return ok, f"route of {e.params['agent']}: {p}"
    if e.kind == "verdict":
        check = e.params["check"]
        if check == "pe1":
            verdict = check_psi_pe(fx.graph, run.routing, 1)
        elif check == "rtd":
            if run.distribution is not None and len(run.distribution) > 1:
                verdicts = [check_rtd(fx.graph, r).verdict for r, _ in run.distribution]
                got = "VIOLATED" if "VIOLATED" in verdicts else verdicts[0]
                return got == e.params["verdict"], f"rtd over support: {verdicts}"
            verdict = check_rtd(fx.graph, run.routing)
        elif check == "rttr":
            verdict = check_rttr(fx.graph, run.routing)
        else:
            raise LiquidTallyError(f"unknown expectation check {check!r}")
        return verdict.verdict == e.params["verdict"], str(verdict)
    if e.kind == "fluid_optimum":
        fl = run.fluid
        ok = fl.optimum == e.params["optimum"] and len(fl.all_optima) == e.params["optima_count"]
        return ok, f"optimum {fl.optimum}, {len(fl.all_optima)} optima"
    if e.kind == "fluid_outcomes_differ":
        return run.fluid.outcome_divergence(fx.graph), "optima share one winner"
    if e.kind == "distribution":
        dist = run.distribution
        probs = {str(p) for _, p in dist}
        ok = len(dist) == e.params["support"] and probs == {e.params["probability"]}
        return ok, f"support {len(dist)}, probabilities {sorted(probs)}"
    if e.kind == "power_max":
        tally = tally_from_routing(fx.graph, run.routing)
        return tally.max_power == e.params["max_power"], f"max power {tally.max_power}"
    if e.kind == "power_cap_holds":
        worst = 0
        for r, _ in run.distribution:
            worst = max(worst, tally_from_routing(fx.graph, r).max_power)
        return worst <= e.params["cap"], f"worst-case power {worst} vs cap {e.params['cap']}"
    raise LiquidTallyError(f"unknown expectation kind {e.kind!r}")


def write_fixture_files(directory: str | os.PathLike, names: tuple[str, ...] | None = None) -> list[str]:
    """Write canonical .ldg files (plus manifests when writing all of them)."""
    os.makedirs(directory, exist_ok=True)
    chosen = FIXTURE_NAMES if names is None else names
    written: list[str] = []
    for name in chosen:
        path = os.path.join(directory, f"{name}.ldg")
        dump_ldg(fixture_graph(name), path)
        written.append(path)
    if names is None:
        scenario_path = os.path.join(directory, "fig4_scenario.json")
        with open(scenario_path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "round1": "fig4a.ldg",
                    "round2": "fig4b.ldg",
                    "changed": "a1",
                    "outcome": "no",
                    "mechanism": "fluid",
                },
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        written.append(scenario_path)
        manifest_path = os.path.join(directory, "table1_inputs.json")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "google-votes": {"mechanisms": ["dfd1", "dfd2"],
                                     "fixtures": ["fig2.ldg", "bfd_rttr_witness.ldg",
                                                  "dfd2_rttr_witness.ldg"]},
                    "liquidfeedback": {"mechanisms": ["lf"], "fixtures": ["fig1.ldg"]},
                    "breadth-first": {"mechanisms": ["bfd"],
                                      "fixtures": ["fig2.ldg", "bfd_rttr_witness.ldg"]},
                    "greedycap": {"mechanisms": ["greedycap"],
                                  "fixtures": ["greedycap_star.ldg", "thm31_pair.ldg"],
                                  "caps": [3, 1]},
                    "fluid": {"mechanisms": ["fluid"],
                              "fixtures": ["fig3.ldg", "fig4a.ldg", "fig4b.ldg"]},
                },
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        written.append(manifest_path)
    return written
