import json
import os
from fractions import Fraction

import pytest

from gpade.cli import main
from gpade.config import load_config, parse_n_grid, parse_operator
from gpade.numberfield import NumberField


class TestConfig:
    def test_n_grid_forms(self):
        assert parse_n_grid("4..8") == [4, 5, 6, 7, 8]
        assert parse_n_grid("4..10:2") == [4, 6, 8, 10]
        assert parse_n_grid([3, 5]) == [3, 5]
        assert parse_n_grid("3, 5 7") == [3, 5, 7]

    def test_operator_literal(self):
        # (1-z) d/dz - 1 as explicit literal with rational strings
        op, prov, name = parse_operator(
            {"dz_coeffs": [["-1"], ["1", "-1"]]})
        assert op.order == 1
        assert name == "custom"

    def test_operator_literal_number_field(self):
        spec = {"field": [1, 0, 1],  # x^2 + 1
                "dz_coeffs": [[["-1", "0"]], [["1", "0"], ["0", "-1"]]]}
        op, _prov, _name = parse_operator(spec)
        assert op.field == NumberField([1, 0, 1])
        assert op.order == 1

    def test_env_cache_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("GFUN_CACHE", str(tmp_path / "cc"))
        cfg = load_config(None, {"operator": "geometric"})
        assert cfg.cache_dir == str(tmp_path / "cc")


class TestCLI:
    def test_analyze_builtin(self, capsys):
        rc = main(["analyze", "--operator", "geometric"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "order mu        : 1" in out
        assert "ell             : 1" in out

    def test_analyze_polylog_q(self, capsys):
        rc = main(["analyze", "--operator", "li2", "--S", "3"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "companion q     : 6" in out   # 1*3 + 3

    def test_malformed_config_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{ not json")
        rc = main(["analyze", "--config", str(bad)])
        err = capsys.readouterr().err
        assert rc == 2
        assert "line" in err and "column" in err

    def test_unknown_builtin_exit_2(self, capsys):
        rc = main(["analyze", "--operator", "nonsense"])
        assert rc == 2

    def test_build_cold_then_warm(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("GFUN_CACHE", str(tmp_path / "cache"))
        args = ["build", "--operator", "geometric", "--n-grid", "3..4",
                "--r", "1", "--S", "2"]
        rc = main(args)
        out1 = capsys.readouterr().out
        assert rc == 0 and "built" in out1
        rc = main(args)
        out2 = capsys.readouterr().out
        assert rc == 0 and "cache hit" in out2
        # identical artifacts byte for byte
        files = sorted((tmp_path / "cache").rglob("*.apx"))
        contents = [f.read_text() for f in files]
        rc = main(args + ["--force"])
        assert rc == 0
        assert [f.read_text() for f in sorted((tmp_path / "cache").rglob("*.apx"))] \
            == contents

    def test_verify_pass_and_mutation_fail(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("GFUN_CACHE", str(tmp_path / "cache"))
        args = ["verify", "--operator", "geometric", "--n-grid", "3..3",
                "--r", "1", "--S", "2", "--precision-bits", "128",
                "--out", str(tmp_path / "out")]
        rc = main(args)
        assert rc == 0
        report = (tmp_path / "out" / "pade_report.txt").read_text()
        assert "(i)-hol" in report and "pass" in report
        # mutate one cached polynomial coefficient and re-verify: (i)-hol fails
        apx = next((tmp_path / "cache").rglob("*.apx"))
        txt = apx.read_text()
        lines = txt.splitlines()
        for i, ln in enumerate(lines):
            if ln.startswith("P 1 1 :"):
                head, coeffs = ln.split(":", 1)
                toks = coeffs.split()
                toks[0] = str(Fraction(toks[0]) + 1)
                lines[i] = head + ": " + " ".join(toks)
                break
        apx.write_text("\n".join(lines) + "\n")
        rc = main(args)   # cache honored, mutated set is verified
        out = capsys.readouterr().out
        assert rc == 1
        report = (tmp_path / "out" / "pade_report.txt").read_text()
        assert "FAIL" in report and "(i)-hol" in report

    def test_eval_writes_values(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("GFUN_CACHE", str(tmp_path / "cache"))
        rc = main(["eval", "--operator", "geometric", "--z0", "1/3",
                   "--n-grid", "3..3", "--r", "1", "--S", "2",
                   "--precision-bits", "96", "--out", str(tmp_path / "out")])
        assert rc == 0
        vals = (tmp_path / "out" / "values.txt").read_text()
        assert "theta" in vals and "J_F" in vals

    def test_missing_z0_exit_2(self, capsys):
        rc = main(["certify", "--operator", "geometric"])
        assert rc == 2
