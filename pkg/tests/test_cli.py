import json

import pytest

from liquidtally.cli import main
from liquidtally.fixtures import write_fixture_files


@pytest.fixture(scope="module")
def fxdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("ldg")
    write_fixture_files(d)
    return d


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTallyCommand:
    def test_bfd_fig2_text(self, capsys, fxdir):
        code, out, _ = run_cli(capsys, "tally", "--mechanism", "bfd", "--input", fxdir / "fig2.ldg")
        assert code == 0
        assert "route a1: a1 -> a4 => yes" in out
        assert "tally: yes=4 no=2 unresolved=0" in out

    def test_machine_output_is_json(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "tally", "--mechanism", "bfd", "--input", fxdir / "fig2.ldg",
            "--format", "machine",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["totals"] == {"yes": 4, "no": 2}
        assert doc["routes"]["a1"] == {"hops": ["a4"], "terminal": "yes"}
        assert doc["power"] == {"a4": 2, "a5": 2, "a6": 2}

    def test_fluid_fig3_warns_about_arbitrariness(self, capsys, fxdir):
        code, out, _ = run_cli(capsys, "tally", "--mechanism", "fluid", "--input", fxdir / "fig3.ldg")
        assert code == 0
        assert "fluid optimum: 2; optimal routings: 2" in out
        assert "warning" in out and "arbitrary" in out

    def test_lf_fig1_unresolved(self, capsys, fxdir):
        code, out, _ = run_cli(capsys, "tally", "--mechanism", "lf", "--input", fxdir / "fig1.ldg")
        assert code == 0
        assert "tally: yes=0 no=0 unresolved=3" in out

    def test_kind_mismatch_exits_2(self, capsys, fxdir):
        code, _, err = run_cli(capsys, "tally", "--mechanism", "lf", "--input", fxdir / "fig2.ldg")
        assert code == 2
        assert "error" in err

    def test_parse_error_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.ldg"
        bad.write_text("edge a a\n")
        code, _, err = run_cli(capsys, "tally", "--mechanism", "lf", "--input", bad)
        assert code == 2
        assert "line 1" in err

    def test_greedycap_requires_cap(self, capsys, fxdir):
        code, _, err = run_cli(
            capsys, "tally", "--mechanism", "greedycap", "--input", fxdir / "greedycap_star.ldg"
        )
        assert code == 2
        code, out, _ = run_cli(
            capsys, "tally", "--mechanism", "greedycap", "--input",
            fxdir / "greedycap_star.ldg", "--cap", "3",
        )
        assert code == 0
        assert "support=3" in out


class TestAuditCommand:
    def test_dfd1_pe1_violation_exits_1(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "audit", "--mechanism", "dfd1", "--input", fxdir / "fig2.ldg",
            "--properties", "pe1",
        )
        assert code == 1
        assert "PE(1): VIOLATED" in out
        assert "witness" in out

    def test_fluid_nad_reports_arbitrary(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "audit", "--mechanism", "fluid", "--input", fxdir / "fig3.ldg",
            "--properties", "nad", "--format", "machine",
        )
        assert code == 1
        doc = json.loads(out)
        assert doc["properties"][0]["property"] == "ARBITRARY"
        assert doc["properties"][0]["witness"]["winner_a"] != doc["properties"][0]["witness"]["winner_b"]

    def test_lf_rtd_vacuous_exits_0(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "audit", "--mechanism", "lf", "--input", fxdir / "fig1.ldg",
            "--properties", "rtd",
        )
        assert code == 0
        assert "RTD: VACUOUS" in out

    def test_unknown_property_exits_2(self, capsys, fxdir):
        code, _, err = run_cli(
            capsys, "audit", "--mechanism", "lf", "--input", fxdir / "fig1.ldg",
            "--properties", "glitter",
        )
        assert code == 2


class TestScenarioCommand:
    def test_fig4_fluid_violated(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "scenario", "--mechanism", "fluid",
            "--round1", fxdir / "fig4a.ldg", "--round2", fxdir / "fig4b.ldg",
            "--changed", "a1", "--outcome", "no",
        )
        assert code == 1
        assert "LOCAL_PRED: VIOLATED" in out
        assert "4/7 -> 3/7" in out

    def test_kind_mismatch_exits_2(self, capsys, fxdir):
        code, _, err = run_cli(
            capsys, "scenario", "--mechanism", "bfd",
            "--round1", fxdir / "fig4a.ldg", "--round2", fxdir / "fig4b.ldg",
            "--changed", "a1", "--outcome", "no",
        )
        assert code == 2

    def test_precondition_failure_exits_0(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "scenario", "--mechanism", "fluid",
            "--round1", fxdir / "fig4a.ldg", "--round2", fxdir / "fig4b.ldg",
            "--changed", "a1", "--outcome", "yes",
        )
        assert code == 0
        assert "PRECONDITION_FAILED" in out

    def test_mismatched_rounds_exit_2(self, capsys, fxdir):
        code, _, err = run_cli(
            capsys, "scenario", "--mechanism", "fluid",
            "--round1", fxdir / "fig4a.ldg", "--round2", fxdir / "fig4b.ldg",
            "--changed", "a3", "--outcome", "no",
        )
        assert code == 2


class TestCompareCommand:
    def test_ranked_trio_on_fig2(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "compare", "--input", fxdir / "fig2.ldg",
            "--mechanisms", "dfd1,dfd2,bfd", "--format", "machine",
        )
        assert code == 0
        doc = json.loads(out)
        assert [r["totals"] for r in doc["rows"]] == [{"yes": 4, "no": 2}] * 3
        assert doc["outcome_divergence"] is False

    def test_fig3_fluid_vs_greedycap(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "compare", "--input", fxdir / "fig3.ldg",
            "--mechanisms", "fluid,greedycap", "--cap", "3",
        )
        assert code == 0
        assert "fluid" in out and "greedycap" in out

    def test_kind_mismatch_marked_na(self, capsys, fxdir):
        code, out, _ = run_cli(
            capsys, "compare", "--input", fxdir / "fig1.ldg", "--mechanisms", "lf,bfd",
        )
        assert code == 0
        assert "N/A" in out


class TestFuzzCommand:
    def test_clean_bfd_campaign(self, capsys):
        code, out, _ = run_cli(
            capsys, "fuzz", "--mechanism", "bfd", "--check", "pe1,sd",
            "--trials", "25", "--seed", "11",
        )
        assert code == 0
        assert "violations: 0" in out

    def test_fluid_nad_fuzz_finds_arbitrary_instances(self, capsys):
        code, out, _ = run_cli(
            capsys, "fuzz", "--mechanism", "fluid", "--check", "nad",
            "--agents", "6", "--trials", "60", "--seed", "0",
        )
        assert code == 1
        assert "minimized witness:" in out

    def test_machine_fuzz_doc(self, capsys):
        code, out, _ = run_cli(
            capsys, "fuzz", "--mechanism", "lf", "--check", "rtd", "--trials", "10",
            "--seed", "5", "--format", "machine",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["trials"] == 10 and doc["violations"] == []


class TestFixturesCommand:
    def test_emit_single(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "fixtures", "--emit", "fig1", "--dir", tmp_path)
        assert code == 0
        assert (tmp_path / "fig1.ldg").exists()

    def test_emit_unknown_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "fixtures", "--emit", "fig99", "--dir", tmp_path)
        assert code == 2


class TestDeterminism:
    COMMANDS = (
        ("tally", "--mechanism", "bfd", "--input", "{d}/fig2.ldg"),
        ("tally", "--mechanism", "fluid", "--input", "{d}/fig3.ldg"),
        ("tally", "--mechanism", "greedycap", "--input", "{d}/greedycap_star.ldg",
         "--cap", "3", "--seed", "17"),
        ("audit", "--mechanism", "dfd1", "--input", "{d}/fig2.ldg", "--properties",
         "rtd,rttr,pe1,gre,sd"),
        ("compare", "--input", "{d}/fig2.ldg", "--mechanisms", "bfd,dfd1,dfd2"),
    )

    def test_machine_output_byte_identical(self, capsys, fxdir):
        for argv in self.COMMANDS:
            argv = [a.format(d=fxdir) for a in argv] + ["--format", "machine"]
            _, out1, _ = run_cli(capsys, *argv)
            _, out2, _ = run_cli(capsys, *argv)
            assert out1 == out2, argv

    def test_env_seed_fallback(self, capsys, fxdir, monkeypatch):
        monkeypatch.setenv("LIQUID_TALLY_SEED", "99")
        code, out, _ = run_cli(
            capsys, "tally", "--mechanism", "greedycap", "--input",
            fxdir / "greedycap_star.ldg", "--cap", "3", "--format", "machine",
        )
        assert code == 0
        assert json.loads(out)["greedycap"]["seed"] == 99
