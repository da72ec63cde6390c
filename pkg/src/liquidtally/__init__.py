"""Delegative (liquid) vote tallying and mechanism auditing.

Five centralized delegation mechanisms over a common preference-graph
model, property checkers for delegation rights / explainability /
arbitrariness / power concentration / local predictability, canonical
counterexample fixtures, seeded fuzzing, and a CLI.
"""

from .model import (
    Edge,
    GraphInvariantError,
    LiquidTallyError,
    MixedRankingError,
    NotDelegableError,
    Outcome,
    PreferenceGraph,
    PreferenceKind,
    RouteMismatchError,
    RoutingViolation,
    TallyResult,
    VotePath,
    VoteRouting,
    WrongKindError,
    classify_kind,
    delegable_agents,
    delegable_subgraph,
    tally_from_routing,
    top_rank_path,
    verify_routing,
)
from .ldgfmt import (
    DuplicateEdgeError,
    LdgError,
    LdgSyntaxError,
    RankMixingError,
    VoteAndDelegateError,
    dump_ldg,
    load_ldg,
    parse_ldg,
    serialize_ldg,
)
from .mechanisms import (
    MECHANISMS,
    FluidTallyResult,
    GreedyCapResult,
    MechanismInfo,
    MechanismRun,
    PathExplosionError,
    RoutingDistribution,
    run_mechanism,
    tally_bfd,
    tally_dfd,
    tally_fluid,
    tally_greedycap,
    tally_lf,
)
from .flowopt import ExactFlowResult, Selection, max_power, solve_exact, solve_greedy
from .audit import (
    PropertyVerdict,
    Scenario,
    ScenarioMismatchError,
    audit_properties,
    check_arbitrariness,
    check_gre,
    check_lfe,
    check_psi_pe,
    check_rtd,
    check_rttr,
    power_report,
    run_scenario,
    table1_report,
)
from .fixtures import FIXTURE_NAMES, Fixture, UnknownFixtureError, fig4_scenario, fixture, fixture_graph
from .gen import GenConfig, fuzz_campaign, onp_as_mrp, random_graph, random_scenario, shrink_graph

__version__ = "0.1.0"
