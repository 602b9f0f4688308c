#!/usr/bin/env python3
"""
多重特異点の型のテストケース

テスト対象:
1. 型の文法（解析と表示）
2. codim と列挙
3. 符号の縮約と原像
4. 記号的なA1指数
"""

import sys
from pathlib import Path

import pytest

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from caustic.core.errors import TypeGrammarError
from caustic.core.types import (
    CAUSTIC, GENERATORS, MIXED, CausticType, MixedType, MultisingularityType, ShiftedType,
    codim, collapse_type, enumerate_types, parse_type, preimages,
)


class TestTypeGrammar:
    """型の文法のテストクラス"""

    # ==================== 解析 ====================

    def test_parse_and_format(self):
        m = parse_type("D4+ A3- A1^3")
        assert m.codim == 5
        assert m.a1_degree == 3
        assert str(m) == "D4+ A3- A1^3"

    def test_display_order_is_canonical(self):
        assert str(parse_type("A2^2 A3+")) == "A3+ A2^2"
        assert str(parse_type("A1 E6- A2")) == "E6- A2 A1"
        assert parse_type("A2 A2") == parse_type("A2^2")

    def test_unit(self):
        unit = parse_type("1")
        assert unit.is_unit()
        assert unit.codim == 0
        assert str(unit) == "1"

    @pytest.mark.parametrize("text", ["A3", "A7", "B2", "A2^0", "A2^-1", "A2^", "", "A2x"])
    def test_invalid_types(self, text):
        with pytest.raises(TypeGrammarError):
            parse_type(text)

    def test_unsigned_symbol_needs_sign(self):
        with pytest.raises(TypeGrammarError) as exc:
            parse_type("D4 A2")
        assert "requires a sign" in exc.value.message

    def test_error_carries_column(self):
        with pytest.raises(TypeGrammarError) as exc:
            parse_type("A2 A3+ A9")
        assert exc.value.column == 8

    def test_caustic_symbols(self):
        c = parse_type("A3^2 A2", CAUSTIC)
        assert isinstance(c, CausticType)
        assert c.codim == 5
        with pytest.raises(TypeGrammarError):
            parse_type("A3+ A2", CAUSTIC)

    # ==================== codim と列挙 ====================

    def test_codim_of_generators(self):
        expected = {"A1": 0, "A2": 1, "A3+": 2, "A4": 3, "A5-": 4, "A6": 5,
                    "D4+": 3, "D5-": 4, "D6+": 5, "E6-": 5}
        for token, value in expected.items():
            assert codim(parse_type(token)) == value

    def test_sixteen_generators(self):
        assert len(GENERATORS) == 16
        assert GENERATORS[0].is_a1

    def test_enumerate_a1_free_codim_five(self):
        types = enumerate_types(5, 0)
        assert len(types) == 48
        assert types[0].is_unit()
        assert all(t.a1_degree == 0 for t in types)

    def test_enumerate_counts_by_codim(self):
        counts = {}
        for t in enumerate_types(5, 0):
            counts[t.codim] = counts.get(t.codim, 0) + 1
        assert counts == {0: 1, 1: 1, 2: 3, 3: 6, 4: 13, 5: 24}

    def test_enumerate_is_sorted_and_deterministic(self):
        types = enumerate_types(2, 3)
        assert types == sorted(types, key=lambda t: t.sort_key())
        assert types == enumerate_types(2, 3)
        assert len(types) == 4 * 5

    @pytest.mark.parametrize("max_a1", [0, 1, 5, 12])
    def test_enumerate_count_with_a1(self, max_a1):
        assert len(enumerate_types(5, max_a1)) == 48 * (max_a1 + 1)

    def test_enumerate_is_closed_under_divisors(self):
        types = set(enumerate_types(5, 12))
        for m in types:
            for i, exp in enumerate(m.exponents):
                if exp:
                    lowered = list(m.exponents)
                    lowered[i] -= 1
                    assert MultisingularityType(tuple(lowered)) in types, str(m)

    def test_format_parses_back(self):
        for m in enumerate_types(5, 12):
            assert parse_type(str(m)) == m

    def test_enumerate_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            enumerate_types(6, 0)
        with pytest.raises(ValueError):
            enumerate_types(3, -1)


class TestSignCollapse:
    """符号の縮約のテストクラス"""

    def test_collapse_type(self):
        assert str(collapse_type(parse_type("A3+ A3- A2"))) == "A3^2 A2"
        assert str(collapse_type(parse_type("D4- A2^2"))) == "D4- A2^2"
        assert str(collapse_type(parse_type("E6+"))) == "E6"

    def test_preimages(self):
        pre = preimages(parse_type("A3^2", CAUSTIC))
        assert {str(p) for p in pre} == {"A3+^2", "A3+ A3-", "A3-^2"}
        assert preimages(parse_type("D4+ A2", CAUSTIC)) == [parse_type("D4+ A2")]

    def test_preimages_collapse_back(self):
        for c in enumerate_types(5, 0, CausticType):
            for p in preimages(c):
                assert collapse_type(p) == c

    def test_mixed_expansion(self):
        m = parse_type("D4+ A3", MIXED)
        assert isinstance(m, MixedType)
        assert {str(x) for x in m.expand()} == {"D4+ A3+", "D4+ A3-"}
        assert parse_type("A4 A2^2", MIXED).expand() == [parse_type("A4 A2^2")]


class TestShiftedType:
    """記号的なA1指数のテストクラス"""

    def test_instantiate(self):
        s = ShiftedType(parse_type("D5+ A2"), 2)
        assert s.instantiate(1) is None
        assert s.instantiate(2) == parse_type("D5+ A2")
        assert s.instantiate(5) == parse_type("D5+ A2 A1^3")

    def test_format(self):
        assert str(ShiftedType(parse_type("A2"), 0)) == "A2 A1^{k}"
        assert str(ShiftedType(parse_type("A2"), 3)) == "A2 A1^{k-3}"
        assert str(ShiftedType(MultisingularityType.unit(), 1)) == "A1^{k-1}"

    def test_base_must_be_a1_free(self):
        with pytest.raises(TypeGrammarError):
            ShiftedType(parse_type("A2 A1"), 0)
