import json
import math

import pytest

import induced_pressure.cli as cli
from induced_pressure.config import RunConfig, ValidationError


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestConfig:
    def test_round_trip_is_idempotent(self):
        text = """
[shift]
family = "renewal"

[psi]
builtin = "alpha_farey_geometric"

[run]
collection = "periodic@1"
trunc = 128
"""
        c1 = RunConfig.from_text(text)
        t1 = c1.to_toml()
        c2 = RunConfig.from_text(t1)
        assert c2.to_toml() == t1
        assert c1.config_hash() == c2.config_hash()

    def test_unknown_section_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig.from_text("[bogus]\nx = 1\n")

    def test_bad_family_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig.from_text('[shift]\nfamily = "weird"\n')

    def test_matrix_family_and_table_potential(self):
        text = """
[shift]
family = "matrix"
rows = [[1, 1], [1, 0]]

[phi]
builtin = "table"
depth = 1
entries = [[1, 0.5], [2, -0.25]]
"""
        cfg = RunConfig.from_text(text)
        spec = cfg.build_shift()
        assert spec.allows(1, 2) and not spec.allows(2, 2)
        phi = cfg.build_potential("phi")
        assert phi((2,)) == -0.25

    def test_collection_parsing(self):
        assert RunConfig.parse_collection("periodic@3").at == 3
        assert RunConfig.parse_collection("starting:1,2").starting == frozenset({1, 2})
        with pytest.raises(ValidationError):
            RunConfig.parse_collection("bogus:stuff")


class TestSubcommands:
    def test_pressure_pseudo_full_shift(self, capsys):
        code, out = run_cli(
            capsys, "pressure", "--shift", "full:2", "--phi", "zero",
            "--psi", "constant:1", "--method", "pseudo",
        )
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["value"] == pytest.approx(math.log(2), abs=1e-9)
        assert res["method"] == "pseudo-inverse"

    def test_gurevich_farey(self, capsys):
        code, out = run_cli(
            capsys, "gurevich", "--shift", "renewal",
            "--psi", "alpha_farey_geometric", "--phi", "zero",
            "--trunc", "20000", "--max-len", "20000", "--at", "1",
        )
        assert code == 0
        res = json.loads(out)["results"][0]
        # the fixture tail bound makes the value cap-independent
        assert res["value"] == pytest.approx(1.0, abs=1e-6)

    def test_loops_counts(self, capsys):
        code, out = run_cli(
            capsys, "loops", "--shift", "renewal", "--trunc", "10",
            "--max-len", "10", "--at", "1",
        )
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["counts"] == {str(n): "1" for n in range(1, 11)}

    def test_group_ext_z(self, capsys):
        code, out = run_cli(capsys, "group-ext", "--group", "z^1", "--nmax", "512")
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["verdict"] == "amenable-consistent"
        assert not res["irreducibility"]["finitely_irreducible"]

    def test_group_ext_from_table_file(self, capsys, tmp_path):
        table = tmp_path / "z3.tbl"
        table.write_text("e a b\ne a b\na b e\nb e a\n")
        code, out = run_cli(
            capsys, "group-ext", "--group", f"file:{table}", "--nmax", "64",
        )
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["verdict"] == "amenable-consistent"
        assert res["irreducibility"]["finitely_irreducible"]

    def test_flow_subcommand(self, capsys):
        code, out = run_cli(
            capsys, "flow", "--shift", "full:2", "--tau", "constant:2",
            "--phi", "zero", "--trunc", "2", "--max-len", "60",
        )
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["value"] == pytest.approx(math.log(2) / 2, abs=1e-9)

    def test_fixtures_catalog(self, capsys):
        code, out = run_cli(capsys, "fixtures")
        assert code == 0
        names = {f["name"] for f in json.loads(out)["results"][0]["fixtures"]}
        assert {"alpha-farey", "z-srw", "free-srw", "renewal-phi",
                "unit-suspension"} <= names

    def test_selftest_passes(self, capsys):
        code, out = run_cli(capsys, "selftest")
        assert code == 0
        assert "FAIL" not in out


class TestExitCodes:
    def test_validation_error_is_2(self, capsys):
        code, _ = run_cli(capsys, "pressure", "--shift", "nonsense")
        assert code == 2

    def test_divergence_is_4_and_downgradable(self, capsys):
        argv = [
            "pressure", "--shift", "renewal", "--psi", "alpha_farey_geometric",
            "--phi", "zero", "--method", "window", "--trunc", "600",
            "--tmax", "2", "--length-cap", "25",
        ]
        code, out = run_cli(capsys, *argv)
        assert code == 4
        res = json.loads(out)["results"][0]
        assert res["verdict"] == "+inf"
        assert res["certificate"]["rule"] in (
            "unbounded-symbol-family", "partial-sum-threshold"
        )
        code2, _ = run_cli(capsys, *argv, "--allow-infinite")
        assert code2 == 0


class TestReportDeterminism:
    def test_identical_configs_identical_payloads(self):
        cfg_text = """
[shift]
family = "renewal"

[psi]
builtin = "alpha_farey_geometric"

[run]
method = "exhaust"
collection = "periodic@1"
trunc = 32
"""
        payloads = []
        for _ in range(2):
            cfg = RunConfig.from_text(cfg_text)
            report = cli.run(cfg, "pressure")
            payloads.append(json.dumps(report["results"], sort_keys=True))
        assert payloads[0] == payloads[1]

    def test_config_file_drives_a_run(self, capsys, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            '[shift]\nfamily = "full"\nn = 3\n\n'
            '[run]\nmethod = "pseudo"\n'
        )
        code, out = run_cli(capsys, "pressure", "--config", str(cfg))
        assert code == 0
        res = json.loads(out)["results"][0]
        assert res["value"] == pytest.approx(math.log(3), abs=1e-9)
        # flags override config fields
        code, out = run_cli(capsys, "pressure", "--config", str(cfg),
                            "--shift", "full:2")
        assert json.loads(out)["results"][0]["value"] == pytest.approx(
            math.log(2), abs=1e-9
        )

    def test_csv_output_for_sequences(self, capsys, tmp_path):
        out_file = tmp_path / "seq.csv"
        code, _ = run_cli(
            capsys, "pressure", "--shift", "renewal",
            "--psi", "alpha_farey_geometric", "--phi", "zero",
            "--method", "exhaust", "--collection", "periodic@1",
            "--trunc", "32", "--format", "csv", "--out", str(out_file),
        )
        assert code == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0] == "index,value"
        assert len(lines) >= 4
