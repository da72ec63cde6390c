import pytest

from liquidtally import (
    LiquidTallyError,
    Outcome,
    PreferenceGraph,
    PreferenceKind,
    classify_kind,
    run_scenario,
)
from liquidtally.gen import (
    GenConfig,
    fuzz_campaign,
    onp_as_mrp,
    random_graph,
    random_scenario,
    shrink_graph,
)

from .oracles import nx_digraph


class TestRandomGraph:
    def test_single_voter_config(self):
        g = random_graph(GenConfig(kind=PreferenceKind.ONP, n_agents=1, voter_fraction=1.0, seed=0))
        assert g.n == 1 and g.m == 0 and len(g.votes) == 1

    def test_seed_determinism(self):
        cfg = GenConfig(kind=PreferenceKind.MRP, n_agents=20, seed=99)
        assert random_graph(cfg) == random_graph(cfg)
        other = GenConfig(kind=PreferenceKind.MRP, n_agents=20, seed=100)
        assert random_graph(cfg) != random_graph(other)

    def test_onp_out_degree_one(self):
        for seed in range(1000):
            g = random_graph(GenConfig(kind=PreferenceKind.ONP, n_agents=8, seed=seed))
            for d in g.agents:
                assert len(g.out_edges(d)) <= 1
            for d in g.agents:
                if d not in g.votes:
                    assert len(g.out_edges(d)) == 1

    def test_kinds_are_valid_for_request(self):
        for seed in range(150):
            mrp = random_graph(GenConfig(kind=PreferenceKind.MRP, n_agents=10, seed=seed))
            assert all(e.rank is not None for e in mrp.edges)
            assert classify_kind(mrp) is PreferenceKind.MRP or mrp.m == 0
            mup = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=10, seed=seed))
            assert all(e.rank is None for e in mup.edges)

    def test_cycle_bias_at_least_twenty_percent(self):
        import networkx as nx

        cyclic = 0
        trials = 300
        for seed in range(trials):
            g = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=12,
                                       voter_fraction=0.3, seed=seed))
            try:
                nx.find_cycle(nx_digraph(g))
                cyclic += 1
            except nx.NetworkXNoCycle:
                pass
        assert cyclic / trials >= 0.20

    def test_bad_configs_rejected(self):
        with pytest.raises(LiquidTallyError):
            GenConfig(kind=PreferenceKind.ONP, n_agents=0)
        with pytest.raises(LiquidTallyError):
            GenConfig(kind=PreferenceKind.ONP, n_agents=3, voter_fraction=0.0)
        with pytest.raises(LiquidTallyError):
            GenConfig(kind=PreferenceKind.ONP, n_agents=3, max_out_degree=0)


class TestRandomScenario:
    def test_deterministic(self):
        cfg = GenConfig(kind=PreferenceKind.MRP, n_agents=9, voter_fraction=0.4, seed=12)
        a = random_scenario(cfg, Outcome.YES, mechanism="bfd")
        b = random_scenario(cfg, Outcome.YES, mechanism="bfd")
        assert (a is None) == (b is None)
        if a is not None:
            assert a.round1 == b.round1 and a.round2 == b.round2 and a.changed == b.changed

    def test_produces_strictly_favoring_cases(self):
        produced = 0
        for seed in range(60):
            cfg = GenConfig(kind=PreferenceKind.MRP, n_agents=9, voter_fraction=0.4, seed=seed)
            s = random_scenario(cfg, Outcome.NO, mechanism="bfd")
            if s is None:
                continue
            produced += 1
            v = run_scenario("bfd", s)
            assert v.verdict != "PRECONDITION_FAILED", seed
        assert produced >= 10

    def test_none_when_no_favoring_target_exists(self):
        # find a seeded graph whose voters all chose YES: no change can favor NO
        found = False
        for seed in range(300):
            cfg = GenConfig(kind=PreferenceKind.ONP, n_agents=6, voter_fraction=0.5, seed=seed)
            g = random_graph(cfg)
            if g.votes and all(o is Outcome.YES for o in g.votes.values()):
                assert random_scenario(cfg, Outcome.NO, mechanism="lf") is None
                found = True
                break
        assert found

    def test_randomized_mechanism_rejected(self):
        cfg = GenConfig(kind=PreferenceKind.MUP, n_agents=6, seed=1)
        with pytest.raises(LiquidTallyError):
            random_scenario(cfg, Outcome.YES, mechanism="greedycap")


class TestShrink:
    def test_minimizes_cap_rtd_witness(self):
        from liquidtally import audit, run_mechanism

        def failing(h):
            run = run_mechanism("greedycap", h, cap=1, seed=0, enum_limit=50, mc_trials=20)
            return any(
                audit.check_rtd(h, r).verdict == audit.VIOLATED for r, _ in run.distribution
            )

        g = random_graph(GenConfig(kind=PreferenceKind.MUP, n_agents=10,
                                   voter_fraction=0.4, seed=5))
        assert failing(g)
        small = shrink_graph(g, failing)
        assert failing(small)
        assert small.n <= 2  # the minimal witness is one delegator and one voter

    def test_shrink_keeps_failures_only(self):
        g = PreferenceGraph(edges=[("a", "v")], votes={"v": "yes"})
        out = shrink_graph(g, lambda h: h.m >= 1)
        assert out.m == 1 and out.n == 2


class TestFuzzCampaign:
    def test_clean_campaign(self):
        report = fuzz_campaign("bfd", ["pe1", "rtd"], trials=40, seed=7)
        assert report.ok
        assert report.trials == 40

    def test_catches_planted_violation(self):
        report = fuzz_campaign("bfd", ["rttr"], trials=60, seed=1, n_agents=8)
        assert not report.ok  # breadth-first provably breaks right-to-top-rank
        v = report.violations[0]
        assert v.check == "rttr"
        assert "edge" in v.minimized_ldg
        minimized = len(v.minimized_ldg.splitlines())
        assert minimized <= len(v.witness_ldg.splitlines())

    def test_greedycap_campaign(self):
        report = fuzz_campaign("greedycap", ["cp", "det"], trials=30, seed=3, cap=3)
        assert report.ok

    def test_report_dict_shape(self):
        report = fuzz_campaign("lf", ["pe1"], trials=5, seed=2)
        doc = report.as_dict()
        assert doc["mechanism"] == "lf" and doc["trials"] == 5


def test_onp_as_mrp_embedding():
    g = random_graph(GenConfig(kind=PreferenceKind.ONP, n_agents=8, seed=4))
    embedded = onp_as_mrp(g)
    assert classify_kind(embedded) is PreferenceKind.MRP or embedded.m == 0
    assert {(e.src, e.dst) for e in embedded.edges} == {(e.src, e.dst) for e in g.edges}
