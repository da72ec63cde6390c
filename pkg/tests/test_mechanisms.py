import pytest

from liquidtally import (
    Outcome,
    PathExplosionError,
    PreferenceGraph,
    PreferenceKind,
    VotePath,
    WrongKindError,
    fixture_graph,
    run_mechanism,
    tally_bfd,
    tally_dfd,
    tally_fluid,
    tally_from_routing,
    tally_greedycap,
    tally_lf,
    top_rank_path,
    verify_routing,
)
from liquidtally.gen import GenConfig, onp_as_mrp, random_graph

from . import oracles


class TestKindGates:
    def test_lf_rejects_ranked_and_multi(self):
        with pytest.raises(WrongKindError):
            tally_lf(fixture_graph("fig2"))
        with pytest.raises(WrongKindError):
            tally_lf(fixture_graph("fig3"))

    def test_bfd_rejects_unranked(self):
        with pytest.raises(WrongKindError):
            tally_bfd(fixture_graph("fig3"))
        with pytest.raises(WrongKindError):
            tally_dfd(fixture_graph("fig1"), 1)

    def test_fluid_and_greedycap_reject_ranked(self):
        with pytest.raises(WrongKindError):
            tally_fluid(fixture_graph("fig2"))
        with pytest.raises(WrongKindError):
            tally_greedycap(fixture_graph("fig2"), 3)

    def test_unranked_single_choice_accepted_by_approval_mechanisms(self):
        g = fixture_graph("thm31_pair")  # classifies as ONP
        assert tally_fluid(g).optimum == 2
        assert tally_greedycap(g, 3).exact

    def test_edgeless_graph_accepted_everywhere(self):
        g = PreferenceGraph(votes={"v": "yes"})
        for mid, kwargs in (
            ("lf", {}), ("bfd", {}), ("dfd1", {}), ("fluid", {}),
            ("greedycap", {"cap": 2}),
        ):
            run = run_mechanism(mid, g, **kwargs)
            assert run.routing.path("v") == VotePath("v", (), Outcome.YES)


class TestTallyLf:
    def test_fig1_all_unresolved(self):
        g = fixture_graph("fig1")
        t = tally_from_routing(g, tally_lf(g))
        assert t.totals == {Outcome.YES: 0, Outcome.NO: 0}
        assert t.unresolved_count == 3

    def test_chain(self):
        g = PreferenceGraph(edges=[("a1", "a2"), ("a2", "v")], votes={"v": "yes"})
        r = tally_lf(g)
        assert r.path("a1") == VotePath("a1", ("a2", "v"), Outcome.YES)
        assert r.path("a2") == VotePath("a2", ("v",), Outcome.YES)
        assert tally_from_routing(g, r).totals[Outcome.YES] == 3

    def test_feeder_into_voterless_cycle_unresolved(self):
        g = PreferenceGraph(edges=[("a1", "a2"), ("a2", "a1"), ("a3", "a1")])
        r = tally_lf(g)
        assert r.unresolved_agents() == ("a1", "a2", "a3")

    def test_dead_end_at_abstainer(self):
        g = PreferenceGraph(edges=[("a1", "a2")], agents=["a2"], votes={"v": "no"})
        r = tally_lf(g)
        assert not r.resolved("a1") and not r.resolved("a2")

    def test_matches_naive_oracle(self):
        for seed in range(150):
            g = random_graph(GenConfig(kind=PreferenceKind.ONP, n_agents=15, seed=seed))
            r = tally_lf(g)
            for a in g.agents:
                assert r.path(a) == oracles.oracle_lf_route(g, a), (seed, a)


class TestTallyBfd:
    def test_fig2_routes(self):
        g = fixture_graph("fig2")
        r = tally_bfd(g)
        assert r.path("a1") == VotePath("a1", ("a4",), Outcome.YES)
        assert r.path("a2") == VotePath("a2", ("a6",), Outcome.NO)
        assert r.path("a3") == VotePath("a3", ("a5",), Outcome.YES)
        t = tally_from_routing(g, r)
        assert t.totals == {Outcome.YES: 4, Outcome.NO: 2}
        assert t.power == {"a4": 2, "a5": 2, "a6": 2}

    def test_prefers_short_over_top_rank(self):
        g = fixture_graph("bfd_rttr_witness")
        r = tally_bfd(g)
        assert r.path("a1") == VotePath("a1", ("v1",), Outcome.YES)
        assert top_rank_path(g, "a1") == VotePath("a1", ("a2", "v2"), Outcome.NO)

    def test_non_delegable_unresolved(self):
        g = PreferenceGraph(edges=[("a1", "a2", 1), ("a2", "a1", 1)], votes={"v": "yes"})
        r = tally_bfd(g)
        assert not r.resolved("a1") and not r.resolved("a2")

    def test_path_lengths_are_graph_distances(self):
        for seed in range(80):
            g = random_graph(GenConfig(kind=PreferenceKind.MRP, n_agents=12, seed=seed))
            r = tally_bfd(g)
            dist = oracles.oracle_bfs_dist(g)
            for a in g.agents:
                p = r.path(a)
                if p is None:
                    assert a not in dist
                    continue
                assert len(p.hops) == dist[a], (seed, a)

    def test_matches_brute_oracle(self):
        for seed in range(120):
            g = random_graph(GenConfig(kind=PreferenceKind.MRP, n_agents=10, seed=500 + seed))
            r = tally_bfd(g)
            for a in g.agents:
                assert r.path(a) == oracles.oracle_bfd_route(g, a), (seed, a)


class TestTallyDfd:
    def test_fig2_approach1(self):
        g = fixture_graph("fig2")
        r = tally_dfd(g, 1)
        assert r.path("a1") == VotePath("a1", ("a2", "a3", "a5"), Outcome.YES)
        assert r.path("a2") == VotePath("a2", ("a3", "a1", "a4"), Outcome.YES)
        assert r.path("a3") == VotePath("a3", ("a1", "a2", "a6"), Outcome.NO)
        assert tally_from_routing(g, r).totals == {Outcome.YES: 4, Outcome.NO: 2}

    def test_fig2_approach2(self):
        g = fixture_graph("fig2")
        r = tally_dfd(g, 2)
        assert r.path("a1") == VotePath("a1", ("a2", "a6"), Outcome.NO)
        assert r.path("a2") == VotePath("a2", ("a3", "a5"), Outcome.YES)
        assert r.path("a3") == VotePath("a3", ("a1", "a4"), Outcome.YES)
        assert tally_from_routing(g, r).totals == {Outcome.YES: 4, Outcome.NO: 2}

    def test_approach2_shortest_overrides_rank(self):
        g = fixture_graph("dfd2_rttr_witness")
        r = tally_dfd(g, 2)
        assert r.path("a1") == VotePath("a1", ("a2", "v2"), Outcome.NO)
        assert top_rank_path(g, "a1") == VotePath("a1", ("a2", "a3", "v3"), Outcome.YES)

    def test_approach1_follows_top_rank_path(self):
        g = fixture_graph("dfd2_rttr_witness")
        r = tally_dfd(g, 1)
        assert r.path("a1") == top_rank_path(g, "a1")

    def test_path_guard_trips(self):
        g = fixture_graph("fig2")
        with pytest.raises(PathExplosionError):
            tally_dfd(g, 1, path_guard=3)

    def test_bad_approach(self):
        with pytest.raises(ValueError):
            tally_dfd(fixture_graph("fig2"), 3)

    def test_matches_brute_oracles(self):
        for seed in range(100):
            g = random_graph(GenConfig(kind=PreferenceKind.MRP, n_agents=9, seed=900 + seed))
            r1 = tally_dfd(g, 1)
            r2 = tally_dfd(g, 2)
            for a in g.agents:
                assert r1.path(a) == oracles.oracle_dfd1_route(g, a), (seed, a)
                assert r2.path(a) == oracles.oracle_dfd2_route(g, a), (seed, a)


class TestTallyGreedycap:
    def test_star_cap4_forced(self):
        g = fixture_graph("greedycap_star")
        res = tally_greedycap(g, 4, seed=7)
        assert res.exact and len(res.distribution) == 1
        t = tally_from_routing(g, res.sampled)
        assert t.totals[Outcome.YES] == 4
        assert t.power == {"v": 4}

    def test_star_cap3_three_branches(self):
        g = fixture_graph("greedycap_star")
        res = tally_greedycap(g, 3, seed=7)
        assert res.exact
        assert [str(p) for _, p in res.distribution] == ["1/3", "1/3", "1/3"]
        for routing, _ in res.distribution:
            t = tally_from_routing(g, routing)
            assert t.totals[Outcome.YES] == 3
            assert t.unresolved_count == 1
            assert t.max_power == 3

    def test_cap1_blocks_delegation(self):
        g = fixture_graph("thm31_pair")
        res = tally_greedycap(g, 1, seed=0)
        assert res.exact and len(res.distribution) == 1
        t = tally_from_routing(g, res.sampled)
        assert t.totals[Outcome.YES] == 1
        assert not res.sampled.resolved("a1")
        assert res.sampled.notes["a1"] == "instructed-to-vote"

    def test_handoff_to_nonvoter_target(self):
        # a2 collects a1's vote but never casts it
        g = PreferenceGraph(edges=[("a1", "a2"), ("a3", "a2")], votes={"v": "yes"})
        res = tally_greedycap(g, 3, seed=1)
        routing = res.sampled
        assert routing.handoffs == {"a1": "a2", "a3": "a2"}
        assert not routing.resolved("a1") and not routing.resolved("a2")
        assert "unresolved terminal" in routing.notes["a2"]
        t = tally_from_routing(g, routing)
        assert t.totals[Outcome.YES] == 1  # only the unrelated voter
        assert t.unresolved_count == 3
        assert verify_routing(g, routing) == []

    def test_cap_invariant_and_seed_determinism(self):
        for seed in range(60):
            g = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=12,
                                       voter_fraction=0.3, seed=seed))
            a = tally_greedycap(g, 3, seed=seed, enum_limit=200, mc_trials=40)
            b = tally_greedycap(g, 3, seed=seed, enum_limit=200, mc_trials=40)
            assert a.sampled.canonical_key() == b.sampled.canonical_key()
            assert tally_from_routing(g, a.sampled).max_power <= 3

    def test_monte_carlo_fallback(self):
        g = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=10, seed=17))
        res = tally_greedycap(g, 2, seed=5, enum_limit=1, mc_trials=50)
        assert not res.exact
        assert sum(p for _, p in res.distribution) == 1

    def test_sampler_matches_exact_distribution(self):
        # the branch enumerator and the seeded sampler are independent code
        # paths; their distributions must agree on asymmetric inputs
        import math
        import random as _random
        from collections import Counter

        from liquidtally.mechanisms import _greedycap_branches, _greedycap_once, _greedycap_routing

        for seed in (3, 11, 19):
            g = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=7,
                                       voter_fraction=0.4, edge_density=0.6, seed=seed))
            for cap in (2, 3):
                acc = _greedycap_branches(g, cap, 100_000)
                exact = {k: p for k, (_, p) in acc.items()}
                rng = _random.Random(seed * 31 + cap)
                trials = 1500
                counts = Counter(
                    _greedycap_routing(g, _greedycap_once(g, cap, rng)).canonical_key()
                    for _ in range(trials)
                )
                assert not set(counts) - set(exact), (seed, cap)
                for key, p in exact.items():
                    expect = float(p) * trials
                    sigma = math.sqrt(trials * float(p) * (1 - float(p))) or 1.0
                    assert abs(counts.get(key, 0) - expect) <= 5 * sigma + 1, (seed, cap)

    def test_runs_on_cyclic_input(self):
        g = fixture_graph("fig1")  # pure unranked cycle, no voters
        res = tally_greedycap(g, 2, seed=3)
        t = tally_from_routing(g, res.sampled)
        assert t.cast == 0  # votes land on non-voter holders, nothing cast

    def test_cap_must_be_positive(self):
        with pytest.raises(ValueError):
            tally_greedycap(fixture_graph("greedycap_star"), 0)


class TestTallyFluid:
    def test_fig3(self):
        g = fixture_graph("fig3")
        res = tally_fluid(g)
        assert res.optimum == 2
        assert len(res.all_optima) == 2
        assert res.outcome_divergence(g)
        tallies = sorted(
            (t.totals[Outcome.YES], t.totals[Outcome.NO])
            for t in (tally_from_routing(g, r) for r in res.all_optima)
        )
        assert tallies == [(1, 2), (2, 1)]

    def test_fig4_pair(self):
        g4a, g4b = fixture_graph("fig4a"), fixture_graph("fig4b")
        ra = tally_fluid(g4a)
        rb = tally_fluid(g4b)
        ta = tally_from_routing(g4a, ra.canonical)
        tb = tally_from_routing(g4b, rb.canonical)
        assert (ta.totals[Outcome.YES], ta.totals[Outcome.NO]) == (3, 4)
        assert (tb.totals[Outcome.YES], tb.totals[Outcome.NO]) == (4, 3)
        assert ra.optimum == 3 and not ra.truncated and len(ra.all_optima) == 1
        assert rb.optimum == 4 and len(rb.all_optima) == 1

    def test_cycle_with_escape_is_broken(self):
        g = PreferenceGraph(edges=[("a1", "a2"), ("a2", "a1"), ("a2", "v")], votes={"v": "yes"})
        res = tally_fluid(g)
        assert res.canonical.resolved("a1") and res.canonical.resolved("a2")

    def test_voterless_component_discarded(self):
        g = PreferenceGraph(
            edges=[("a1", "a2"), ("a2", "a1"), ("b", "v")], votes={"v": "no"}
        )
        res = tally_fluid(g)
        assert not res.canonical.resolved("a1")
        assert res.canonical.resolved("b")

    def test_truncation_keeps_canonical(self):
        res = tally_fluid(fixture_graph("fig3"), enum_limit=1)
        assert res.truncated
        assert res.optimum == 2
        assert res.canonical.path("a1").hops == ("a2",)


class TestCrossMechanismInvariants:
    MECHS = (("lf", PreferenceKind.ONP), ("bfd", PreferenceKind.MRP),
             ("dfd1", PreferenceKind.MRP), ("dfd2", PreferenceKind.MRP),
             ("fluid", PreferenceKind.MUP))

    @pytest.mark.parametrize("mid,kind", MECHS)
    def test_outputs_verify_clean(self, mid, kind):
        for seed in range(40):
            g = random_graph(GenConfig(kind=kind, n_agents=10, seed=7000 + seed))
            run = run_mechanism(mid, g)
            assert verify_routing(g, run.routing) == [], (mid, seed)

    def test_greedycap_outputs_verify_clean(self):
        for seed in range(30):
            g = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=10, seed=8000 + seed))
            run = run_mechanism("greedycap", g, cap=3, seed=seed, enum_limit=100, mc_trials=30)
            assert verify_routing(g, run.routing) == [], seed

    @pytest.mark.parametrize("mid", ("lf", "bfd"))
    def test_confluence_of_chain_and_bfs_tallies(self, mid):
        kind = PreferenceKind.ONP if mid == "lf" else PreferenceKind.MRP
        for seed in range(60):
            g = random_graph(GenConfig(kind=kind, n_agents=14, seed=300 + seed))
            routing = run_mechanism(mid, g).routing
            out_count = {}
            for u, v in routing.used_edges():
                out_count[u] = out_count.get(u, 0) + 1
            assert all(c <= 1 for c in out_count.values()), (mid, seed)

    def test_dfd1_respects_top_rank_paths(self):
        for seed in range(80):
            g = random_graph(GenConfig(kind=PreferenceKind.MRP, n_agents=9, seed=4200 + seed))
            routing = tally_dfd(g, 1)
            from liquidtally import delegable_subgraph

            dg = delegable_subgraph(g)
            for a in dg.agents:
                if dg.is_voter(a):
                    continue
                expected = top_rank_path(g, a)
                if expected is not None:
                    assert routing.path(a) == expected, (seed, a)

    def test_deterministic_reruns(self):
        g2, g3 = fixture_graph("fig2"), fixture_graph("fig3")
        assert tally_bfd(g2) == tally_bfd(g2)
        assert tally_dfd(g2, 1) == tally_dfd(g2, 1)
        a, b = tally_fluid(g3), tally_fluid(g3)
        assert a.canonical == b.canonical
        assert [r.canonical_key() for r in a.all_optima] == [r.canonical_key() for r in b.all_optima]

    def test_onp_embeds_in_mrp(self):
        # differential harness: chain tally equals breadth-first on the rank-1 embedding
        for seed in range(100):
            g = random_graph(GenConfig(kind=PreferenceKind.ONP, n_agents=12, seed=600 + seed))
            lf_routing = tally_lf(g)
            bfd_routing = tally_bfd(onp_as_mrp(g))
            for a in g.agents:
                assert lf_routing.path(a) == bfd_routing.path(a), (seed, a)
