#!/usr/bin/env python3
"""
設定と出力ユーティリティのテストケース

テスト対象:
1. load_config の既定値と検証
2. safe_json_dumps の決定性
3. format_formulas の @requires の出し方
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from caustic.core.algebra import AlgebraElement
from caustic.core.errors import ErrorCode
from caustic.core.formulas import CaFormula
from caustic.core.relations import Hypothesis
from caustic.core.types import parse_type
from caustic.utils.config import ConfigError, RunConfig, load_config
from caustic.utils.output import format_formulas, render, safe_json_dumps, status_table


class TestLoadConfig:
    """load_config のテストクラス"""

    def test_defaults(self):
        config = load_config()
        assert config == RunConfig()
        assert config.dim == 5
        assert config.a1_max == 12
        assert config.hypothesis is Hypothesis.H0
        assert not config.json

    def test_none_keeps_default(self):
        config = load_config(dim=None, a1_max=None, output_format="json")
        assert config.a1_max == 12
        assert config.json

    def test_hypothesis_is_case_insensitive(self):
        assert load_config(hypothesis="h2").hypothesis is Hypothesis.H2

    @pytest.mark.parametrize("flags", [
        {"dim": 6},
        {"dim": 2},
        {"a1_max": -1},
        {"hypothesis": "H3"},
        {"output_format": "yaml"},
        {"colour": "red"},
    ])
    def test_rejects(self, flags):
        with pytest.raises(ConfigError) as exc:
            load_config(**flags)
        assert exc.value.code is ErrorCode.INVALID_OPTION
        assert exc.value.to_dict()["error"]["type"] == "configuration_error"

    def test_fixture_path(self, tmp_path):
        assert load_config(fixture_path=str(tmp_path)).fixture_path == tmp_path


class TestOutput:
    """出力ユーティリティのテストクラス"""

    def test_json_sorted_and_unicode(self):
        text = safe_json_dumps({"b": 1, "a": "≡"})
        assert text.index('"a"') < text.index('"b"')
        assert "≡" in text
        assert json.loads(text) == {"a": "≡", "b": 1}

    def test_requires_only_on_change(self):
        a2, a4 = parse_type("A2"), parse_type("A4")
        formulas = [
            CaFormula(parse_type("A3+"), AlgebraElement({a4: Fraction(1, 2)})),
            CaFormula(parse_type("A3-"), AlgebraElement({a4: Fraction(1, 2)})),
            CaFormula(parse_type("1"), AlgebraElement({a2: 1}), Hypothesis.H2),
        ]
        lines = format_formulas(formulas, ["@dim 5"]).splitlines()
        assert lines == ["@dim 5", "@requires H0", "A3+ = 1/2*A4", "A3- = 1/2*A4",
                         "@requires H2", "1 = A2"]

    def test_render_is_plain_text(self):
        text = render(status_table("Checks", ["Name", "Status"], [("rank", "PASS")]))
        assert "rank" in text and "PASS" in text
        assert "\x1b[" not in text
