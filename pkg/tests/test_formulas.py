#!/usr/bin/env python3
"""
記号的な k の式・ca式・符号の縮約のテストケース

テスト対象:
1. 平行移動パターンの持ち上げ（lift_parametric）
2. ca への集約と望遠和による検算
3. 符号の縮約（collapse_signs）
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# プロジェクトルートをパスに追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from caustic.core.algebra import AlgebraElement
from caustic.core.engine import RelationEngine
from caustic.core.errors import CollapseError, LiftError
from caustic.core.formulas import (
    CaFormula, aggregate_ca, collapse_signs, lift_parametric, telescope,
)
from caustic.core.relations import Hypothesis, SolvedFormula
from caustic.core.types import CAUSTIC, ShiftedType, parse_type


def t(text: str):
    return parse_type(text)


def family(base: str, top: int, build) -> list:
    """k = 0..top の SolvedFormula を作る"""
    b = t(base)
    return [SolvedFormula(b.with_a1(k), build(k), Hypothesis.H0, 5) for k in range(top + 1)]


def shifted_rhs(k: int) -> AlgebraElement:
    # B A1^k = C A1^k + 1/2 C A1^{k-1}
    c = t("A2")
    terms = {c.with_a1(k): 1}
    if k >= 1:
        terms[c.with_a1(k - 1)] = Fraction(1, 2)
    return AlgebraElement(terms)


@pytest.fixture(scope="module")
def engine():
    return RelationEngine(a1_max=12)


class TestLift:
    """持ち上げのテストクラス"""

    def test_lift_synthetic_family(self):
        p = lift_parametric(family("A3+", 4, shifted_rhs))
        assert p.max_shift == 1
        assert p.terms == AlgebraElement({ShiftedType(t("A2"), 0): 1,
                                          ShiftedType(t("A2"), 1): Fraction(1, 2)})
        assert p.instantiate(0) == AlgebraElement({t("A2"): 1})
        assert p.format() == "A3+ A1^{k} = A2 A1^{k} + 1/2*A2 A1^{k-1}"

    def test_lift_accepts_mapping(self):
        formulas = {f.lhs.a1_degree: f for f in family("A3+", 3, shifted_rhs)}
        assert lift_parametric(formulas).max_shift == 1

    def test_shift_too_close_to_cutoff(self):
        with pytest.raises(LiftError) as exc:
            lift_parametric(family("A3+", 2, shifted_rhs))
        assert "no shift-stability" in exc.value.message

    def test_inconsistent_family(self):
        formulas = family("A3+", 4, shifted_rhs)
        formulas[1] = SolvedFormula(formulas[1].lhs, AlgebraElement({t("A2 A1"): 1}),
                                    Hypothesis.H0, 5)
        with pytest.raises(LiftError):
            lift_parametric(formulas)

    def test_gap_in_family(self):
        formulas = family("A3+", 4, shifted_rhs)
        del formulas[2]
        with pytest.raises(LiftError):
            lift_parametric(formulas)

    def test_hypothesis_at_zero(self):
        formulas = family("1", 4, shifted_rhs)
        formulas = [SolvedFormula(f.lhs, f.rhs, Hypothesis.H2 if f.lhs.is_unit() else Hypothesis.H1, 5)
                    for f in formulas]
        p = lift_parametric(formulas)
        assert p.hypothesis is Hypothesis.H1
        assert p.hypothesis_at_zero is Hypothesis.H2
        assert p.hypothesis_for(0) is Hypothesis.H2
        assert aggregate_ca(p).hypothesis is Hypothesis.H2

    # ==================== 導出された式 ====================

    def test_derived_families(self, engine):
        parametric = engine.parametric(5)
        assert len(parametric) == 17
        assert max(p.max_shift for p in parametric) == 10

    def test_derived_instantiation_matches_every_k(self, engine):
        by_base = {p.lhs_base: p for p in engine.parametric(5)}
        for f in engine.solved(5):
            p = by_base[f.lhs.without_a1()]
            assert p.instantiate(f.lhs.a1_degree) == f.rhs, str(f.lhs)

    def test_dimension_four(self):
        parametric = RelationEngine(a1_max=10).parametric(4)
        assert all(p.lhs_base.codim % 2 == 1 for p in parametric)


class TestCa:
    """ca 集約のテストクラス"""

    def test_aggregate_synthetic(self):
        ca = aggregate_ca(lift_parametric(family("A3+", 4, shifted_rhs)))
        assert ca.lhs == t("A3+")
        assert ca.rhs == AlgebraElement({t("A2"): Fraction(3, 2)})
        assert ca.format() == "A3+ = 3/2*A2"

    def test_telescope_synthetic(self):
        p = lift_parametric(family("A3+", 4, shifted_rhs))
        assert telescope(p).rhs == aggregate_ca(p).rhs

    def test_telescope_agrees_with_aggregation(self, engine):
        for p in engine.parametric(5):
            assert telescope(p).rhs == aggregate_ca(p).rhs, str(p.lhs)

    def test_ca_rows_are_a1_free(self, engine):
        for f in engine.ca(5):
            assert f.lhs.a1_degree == 0
            assert all(m.a1_degree == 0 for m in f.rhs.support())

    def test_relation(self):
        f = CaFormula(t("A3+"), AlgebraElement({t("A2"): 2}))
        assert f.relation() == AlgebraElement({t("A3+"): 1, t("A2"): -2})


class TestCollapse:
    """符号の縮約のテストクラス"""

    def test_collapse_pair(self):
        plus = CaFormula(t("A3+"), AlgebraElement({t("D4+ A3+"): 1, t("A4"): Fraction(1, 2)}))
        minus = CaFormula(t("A3-"), AlgebraElement({t("D4+ A3-"): 1, t("A4"): Fraction(1, 2)}))
        [collapsed] = collapse_signs([plus, minus])
        assert collapsed.lhs == parse_type("A3", CAUSTIC)
        assert collapsed.rhs == AlgebraElement({parse_type("D4+ A3", CAUSTIC): 1,
                                                parse_type("A4", CAUSTIC): 1})

    def test_missing_partner_row(self):
        plus = CaFormula(t("A3+"), AlgebraElement({t("A4"): 1}))
        with pytest.raises(CollapseError):
            collapse_signs([plus])

    def test_disagreeing_sign_classes(self):
        plus = CaFormula(t("A3+"), AlgebraElement({t("D4+ A3+"): 1}))
        minus = CaFormula(t("A3-"), AlgebraElement({t("A4"): 1}))
        with pytest.raises(CollapseError):
            collapse_signs([plus, minus])

    def test_derived_collapse(self, engine):
        collapsed = engine.collapsed()
        assert len(collapsed) == 11
        by_lhs = {str(f.lhs): f for f in collapsed}
        assert by_lhs["D5"].rhs == AlgebraElement({parse_type(s, CAUSTIC): 1
                                                for s in ("E6", "D6+", "D6-", "D5 A2")})
        assert by_lhs["1"].hypothesis is Hypothesis.H2
