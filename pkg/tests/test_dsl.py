#!/usr/bin/env python3
"""
式DSLのテストケース

テスト対象:
1. 係数・括弧・継続行
2. δ行の展開
3. 記号的なA1指数（@family k）
4. 構文エラーの行・列
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from caustic.core.algebra import AlgebraElement
from caustic.core.dsl import parse_document, parse_expression
from caustic.core.errors import FormulaSyntaxError
from caustic.core.types import MIXED, MultisingularityType, ShiftedType, parse_type


def t(text: str):
    return parse_type(text)


class TestExpressions:
    """式の解析のテストクラス"""

    def test_coefficients_and_groups(self):
        value = parse_expression("A2 + 1/2*(D4+ - 3*A4) - 2*A3+ A2")
        assert value == AlgebraElement({
            t("A2"): 1, t("D4+"): Fraction(1, 2), t("A4"): Fraction(-3, 2), t("A3+ A2"): -2,
        })

    def test_bare_numbers_are_multiples_of_unit(self):
        assert parse_expression("1") == AlgebraElement.one()
        assert parse_expression("3 - A2") == AlgebraElement({t("1"): 3, t("A2"): -1})
        assert parse_expression("0") == 0

    def test_mixed_table(self):
        value = parse_expression("D4+ A3 + 1/2*A4 A3", MIXED)
        assert len(value) == 2

    def test_delta_tokens_need_a_document(self):
        with pytest.raises(FormulaSyntaxError):
            parse_expression("A3d")

    def test_trailing_garbage(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_expression("A2 )")
        assert exc.value.column == 4


class TestDocuments:
    """文書の解析のテストクラス"""

    def test_directives_and_rows(self):
        rows = parse_document("@dim 5\n@requires H1\n@source demo\nA2 = A3+ + A3-\n")
        assert len(rows) == 1
        row = rows[0]
        assert row.kind == "relation"
        assert row.lhs_key == t("A2")
        assert row.hypothesis == "H1"
        assert row.directives.dim == 5
        assert row.directives.source == "demo"

    def test_continuation_lines(self):
        rows = parse_document("A2 = A3+\n    + A3-   # comment\n\nA4 = 0\n")
        assert len(rows) == 2
        assert rows[0].rhs == AlgebraElement({t("A3+"): 1, t("A3-"): 1})
        assert rows[1].rhs == 0

    def test_delta_rows_expand(self):
        rows = parse_document("A3d A2 = [(1+d)/2]*E6d + A5-d A2\n")
        assert [r.delta for r in rows] == [1, -1]
        assert rows[0].lhs_key == t("A3+ A2")
        assert rows[0].rhs == AlgebraElement({t("E6+"): 1, t("A5- A2"): 1})
        assert rows[1].lhs_key == t("A3- A2")
        assert rows[1].rhs == AlgebraElement({t("A5+ A2"): 1})

    def test_rows_without_delta_are_single(self):
        rows = parse_document("A4 A2 = 2*D6+\n")
        assert len(rows) == 1
        assert rows[0].delta is None

    def test_statements(self):
        rows = parse_document("@symbols mixed\n@modulus 2\nD5 A2\n")
        assert rows[0].kind == "statement"
        assert rows[0].directives.modulus == 2

    def test_expect_directive(self):
        rows = parse_document("@symbols mixed\nA4 A3\n@expect NOT_IMPLIED\nD5 A2\n")
        assert [r.directives.expect for r in rows] == ["IMPLIED", "NOT_IMPLIED"]

    def test_jtable_rows(self):
        rows = parse_document("J(1) = 1\nJ(A3d) = A1 + A3d\n")
        assert [r.kind for r in rows] == ["jtable"] * 3
        assert rows[0].generator is None
        assert rows[1].generator.token == "A3+"
        assert rows[2].rhs == AlgebraElement({t("A1"): 1, t("A3-"): 1})

    def test_jtable_unit_must_be_one(self):
        with pytest.raises(FormulaSyntaxError):
            parse_document("J(1) = 1 + A2\n")

    # ==================== @family k ====================

    def test_family_rows(self):
        rows = parse_document("@family k\nA2 A1^{k} = 1/2*A3+ A1^{k-1} + A1^{k-2}\n")
        row = rows[0]
        assert row.lhs_key == ShiftedType(t("A2"), 0)
        assert row.rhs.coefficient(ShiftedType(t("A3+"), 1)) == Fraction(1, 2)
        assert row.rhs.coefficient(ShiftedType(MultisingularityType.unit(), 2)) == 1

    def test_family_rows_need_symbolic_a1(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_document("@family k\nA2 A1^{k} = A3+\n")
        assert "A1^{k-s}" in exc.value.message

    def test_symbolic_exponent_only_on_a1(self):
        with pytest.raises(FormulaSyntaxError):
            parse_document("@family k\nA2 A1^{k} = A3+^{k}\n")

    def test_symbolic_exponent_outside_family(self):
        with pytest.raises(FormulaSyntaxError):
            parse_document("A2 = A3+ A1^{k}\n")

    # ==================== エラー位置 ====================

    def test_error_line_and_column(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_document("A2 = A3+ + B7\n", source="demo.txt")
        assert exc.value.line == 1
        assert exc.value.column == 12
        assert exc.value.message.startswith("demo.txt:1:12:")

    def test_error_on_continuation_line(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_document("A2 = A3+\n    + A9\n")
        assert exc.value.line == 2

    @pytest.mark.parametrize("text, column", [("", 1), ("   ", 4)])
    def test_empty_expression(self, text, column):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_expression(text, MIXED)
        assert exc.value.column == column
        assert "expected a term" in exc.value.message

    def test_empty_right_hand_side(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse_document("A2 = \n")
        assert exc.value.line == 1

    def test_unknown_directive(self):
        with pytest.raises(FormulaSyntaxError):
            parse_document("@colour red\n")

    @pytest.mark.parametrize("directive", ["@dim 6", "@requires H3", "@modulus 0",
                                           "@symbols greek", "@family j",
                                           "@expect MAYBE"])
    def test_bad_directive_values(self, directive):
        with pytest.raises(FormulaSyntaxError):
            parse_document(directive + "\n")
