#!/usr/bin/env python3
"""
CLIのテストケース

テスト対象:
1. 終了コード（0 成功, 1 検証失敗, 2 使用法エラー）
2. check-parity の判定と witness
3. derive の決定的な出力と --json / --text の対応
4. verify / jtable / report
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import caustic.cli.main as cli_main
from caustic.cli.main import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main
from caustic.core.dsl import parse_document


def run_cli(*args: str) -> subprocess.CompletedProcess:
    """別プロセスでCLIを実行"""
    return subprocess.run([sys.executable, "-m", "caustic.cli.main", *args],
                          cwd=project_root, capture_output=True, text=True, timeout=600)


def json_terms(rhs):
    return {(t["type"], t["coeff"]) for t in rhs}


class TestExitCodes:
    """終了コードのテストクラス"""

    def test_unknown_flag(self, capsys):
        assert main(["derive", "--no-such-flag"]) == EXIT_ERROR

    def test_unknown_command(self, capsys):
        assert main(["transmogrify"]) == EXIT_ERROR

    def test_bad_dimension(self, capsys):
        assert main(["derive", "--dim", "7"]) == EXIT_ERROR
        assert "--dim must be one of" in capsys.readouterr().err

    def test_bad_hypothesis_as_json(self, capsys):
        code = main(["check-parity", "--statement", "A4", "--hypothesis", "H9", "--json"])
        assert code == EXIT_ERROR
        error = json.loads(capsys.readouterr().out)["error"]
        assert error["type"] == "configuration_error"

    def test_statement_syntax_error(self, capsys):
        assert main(["check-parity", "--statement", "D5+ A2 + X7"]) == EXIT_ERROR
        assert "Error:" in capsys.readouterr().err

    def test_statement_outside_dimension(self, capsys):
        assert main(["check-parity", "--dim", "3", "--statement", "D5"]) == EXIT_ERROR

    def test_bad_modulus(self, capsys):
        assert main(["check-parity", "--statement", "A4", "--modulus", "0"]) == EXIT_ERROR

    @pytest.mark.parametrize("statement", ["", "   "])
    def test_empty_statement(self, capsys, statement):
        assert main(["check-parity", "--statement", statement, "--modulus", "2"]) == EXIT_ERROR
        assert "expected a term" in capsys.readouterr().err

    def test_unexpected_exception(self, capsys, monkeypatch):
        def boom(*args, **kwargs):
            raise RuntimeError("disk on fire")

        monkeypatch.setattr(cli_main, "load_fixtures", boom)
        assert main(["verify"]) == EXIT_ERROR
        assert "RuntimeError: disk on fire" in capsys.readouterr().err


class TestCheckParity:
    """check-parity のテストクラス"""

    def test_implied(self, capsys):
        code = main(["check-parity", "--statement", "D5+ A2 + D5- A2", "--modulus", "2"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert out.startswith("IMPLIED (H0)")
        assert "verified: yes" in out

    def test_implied_json(self, capsys):
        code = main(["check-parity", "--statement", "D4+ A3 + D4- A3 + E6", "--json"])
        data = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert data["verdict"] == "IMPLIED"
        assert data["hypothesis"] == "H0"
        assert data["witness"]["verified"] is True
        assert data["witness"]["combination"]

    def test_not_implied(self, capsys):
        code = main(["check-parity", "--statement", "A2", "--hypothesis", "H0"])
        out = capsys.readouterr().out
        assert code == EXIT_FAILED
        assert out.startswith("NOT_IMPLIED")
        assert "no counterexample claimed" in out

    def test_classical_dimension(self, capsys):
        code = main(["check-parity", "--dim", "3", "--a1-max", "10", "--statement", "A4"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.startswith("IMPLIED (H0)")


class TestDerive:
    """derive のテストクラス"""

    def test_text_matches_json(self, capsys):
        assert main(["derive", "--dim", "4", "--a1-max", "6"]) == EXIT_OK
        text = capsys.readouterr().out
        assert main(["derive", "--dim", "4", "--a1-max", "6", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)

        rows = parse_document(text)
        assert len(rows) == len(data["formulas"])
        for row, formula in zip(rows, data["formulas"]):
            assert str(row.lhs_key) == formula["lhs"]
            assert json_terms(row.rhs.to_json()) == json_terms(formula["rhs"])
            assert row.hypothesis == formula["hypothesis"]

    def test_deterministic_across_processes(self):
        first = run_cli("derive", "--dim", "3", "--a1-max", "6")
        second = run_cli("derive", "--dim", "3", "--a1-max", "6")
        assert first.returncode == 0, first.stderr
        assert first.stdout == second.stdout
        assert first.stdout.startswith("@dim 3\n@symbols signed\n")

    def test_parametric_directives(self, capsys):
        assert main(["derive", "--dim", "4", "--a1-max", "10", "--parametric"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "@family k" in out
        assert "A1^{k" in out


class TestOtherCommands:
    """verify / jtable / report のテストクラス"""

    def test_jtable_validate(self, capsys):
        assert main(["jtable", "--validate"]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out

    def test_jtable_print(self, capsys):
        assert main(["jtable"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0].startswith("J(A1) = ")
        assert len(out.splitlines()) == 16

    def test_jtable_missing_file(self, capsys, tmp_path):
        assert main(["jtable", "--file", str(tmp_path / "missing.txt")]) == EXIT_ERROR

    def test_verify_subprocess(self):
        result = run_cli("verify")
        assert result.returncode == 0, result.stdout + result.stderr
        assert "FAIL" not in result.stdout
        assert "isolated-points" in result.stdout
        assert "discrepancy: D4+ A2^2 + D4- A2^2" in result.stdout

    def test_verify_json(self, capsys):
        assert main(["verify", "--dim", "4", "--a1-max", "10", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["ok"] is True
        assert data["diffs"] == []

    def test_verify_missing_fixtures(self, capsys, tmp_path):
        assert main(["verify", "--fixtures", str(tmp_path)]) == EXIT_ERROR

    def test_report(self, capsys):
        assert main(["report", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["ok"] is True
        assert len(data["isolated_points"]) == 5
        assert len(data["congruences"]) == 10
        fifth = data["isolated_points"][4]
        assert fifth["verdict"] == "NOT_IMPLIED"
        assert fifth["expected"] == "NOT_IMPLIED"
        assert fifth["as_expected"] is True
        assert all(c["as_expected"] for c in data["isolated_points"] + data["classical"])
