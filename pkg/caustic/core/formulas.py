"""Parametric (symbolic-k) formulas, ca-aggregation and sign collapse"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Union

from .algebra import AlgebraElement
from .errors import CollapseError, LiftError
from .relations import Hypothesis, SolvedFormula, combine
from .types import CausticType, Monomial, ShiftedType, collapse_type, preimages

logger = logging.getLogger(__name__)

STABILITY_MARGIN = 2


@dataclass
class ParametricFormula:
    """lhs_base·A1^k = Σ c·χ(base·A1^{k-s})"""
    lhs_base: Monomial
    terms: AlgebraElement
    hypothesis: Hypothesis = Hypothesis.H0
    hypothesis_at_zero: Hypothesis = Hypothesis.H0
    dim: int = 5

    @property
    def lhs(self) -> ShiftedType:
        return ShiftedType(self.lhs_base)

    @property
    def max_shift(self) -> int:
        return max((key.shift for key in self.terms.support()), default=0)

    @property
    def stable_from(self) -> int:
        """全ての項が現れる最小の k"""
        return self.max_shift

    def shift_terms(self) -> List[tuple]:
        """(係数, base, shift) のリスト"""
        return [(c, key.base, key.shift) for key, c in self.terms.items()]

    def instantiate(self, k: int) -> AlgebraElement:
        """具体的な k での右辺（k-s < 0 の項は0）"""
        result: Dict[Monomial, Fraction] = {}
        for key, c in self.terms.items():
            m = key.instantiate(k)
            if m is not None:
                result[m] = result.get(m, 0) + c
        return AlgebraElement(result)

    def hypothesis_for(self, k: int) -> Hypothesis:
        return self.hypothesis_at_zero if k == 0 else self.hypothesis

    def format(self) -> str:
        return f"{self.lhs} = {self.terms.format()}"

    def to_dict(self) -> Dict:
        return {
            "lhs": str(self.lhs),
            "terms": [{"coeff": f"{c.numerator}/{c.denominator}", "base": str(base), "shift": s}
                      for c, base, s in self.shift_terms()],
            "hypothesis": self.hypothesis.value,
            "hypothesis_at_zero": self.hypothesis_at_zero.value,
        }


def lift_parametric(family: Union[Sequence[SolvedFormula], Mapping[int, SolvedFormula]],
                    margin: int = STABILITY_MARGIN) -> ParametricFormula:
    """k = 0..K の解 B0·A1^k から平行移動パターンを読み取る

    最大の k の式から候補を作り、全ての k で具体化と一致することを確かめる。
    最大シフトが K - margin を超えるときは安定性を確認できない。
    """
    if isinstance(family, Mapping):
        by_k = dict(family)
    else:
        by_k = {f.lhs.a1_degree: f for f in family}
    if not by_k:
        raise LiftError("empty formula family")
    top = max(by_k)
    if sorted(by_k) != list(range(top + 1)):
        raise LiftError(f"formula family must cover k = 0..{top}", {"k": sorted(by_k)})
    base = by_k[top].lhs.without_a1()
    if any(f.lhs.without_a1() != base for f in by_k.values()):
        raise LiftError("formula family mixes different base types")

    terms: Dict[ShiftedType, Fraction] = {}
    for m, c in by_k[top].rhs.items():
        terms[ShiftedType(m.without_a1(), top - m.a1_degree)] = c
    candidate = ParametricFormula(
        lhs_base=base,
        terms=AlgebraElement(terms),
        hypothesis=combine(*(f.hypothesis for k, f in by_k.items() if k > 0)),
        hypothesis_at_zero=by_k[0].hypothesis,
        dim=by_k[top].dim,
    )
    if candidate.max_shift > top - margin:
        raise LiftError(
            f"no shift-stability at K={top} for {base} A1^k (max shift {candidate.max_shift})",
            {"lhs": str(base), "a1_max": top, "max_shift": candidate.max_shift})
    for k, formula in sorted(by_k.items()):
        if candidate.instantiate(k) != formula.rhs:
            raise LiftError(f"no shift-stability at K={top}: {base} A1^{k} differs",
                            {"lhs": str(base), "k": k})
    logger.debug(f"lifted {candidate.lhs} with max shift {candidate.max_shift}")
    return candidate


def lift_all(formulas: Iterable[SolvedFormula],
             margin: int = STABILITY_MARGIN) -> List[ParametricFormula]:
    """解をA1なしの型ごとにまとめて持ち上げる"""
    families: Dict[Monomial, Dict[int, SolvedFormula]] = {}
    for f in formulas:
        families.setdefault(f.lhs.without_a1(), {})[f.lhs.a1_degree] = f
    lifted = [lift_parametric(fam, margin) for fam in families.values()]
    return sorted(lifted, key=lambda p: p.lhs_base.sort_key())


# ==================== ca ====================

@dataclass
class CaFormula:
    """χ(lhs^ca) = Σ c·χ(B^ca)（A1なしの型の上）"""
    lhs: Monomial
    rhs: AlgebraElement
    hypothesis: Hypothesis = Hypothesis.H0

    def relation(self) -> AlgebraElement:
        """lhs - rhs（= 0 となる関係式）"""
        return AlgebraElement.monomial(self.lhs) - self.rhs

    def format(self) -> str:
        return f"{self.lhs} = {self.rhs.format()}"

    def to_dict(self) -> Dict:
        return {"lhs": str(self.lhs), "rhs": self.rhs.to_json(),
                "hypothesis": self.hypothesis.value}


def aggregate_ca(p: ParametricFormula) -> CaFormula:
    """各項 (c, B, s) を c·χ(B^ca) に置き換える"""
    rhs = p.terms.map_keys(lambda key: key.base)
    return CaFormula(p.lhs_base, rhs, combine(p.hypothesis, p.hypothesis_at_zero))


def telescope(p: ParametricFormula, upto: int = 40) -> CaFormula:
    """k = 0..upto の具体化を足し合わせて ca 形を読み取る（エンジン非依存の検算）"""
    depth = upto - p.max_shift
    if depth < 0:
        raise LiftError(f"cannot telescope {p.lhs} to {upto}: max shift {p.max_shift}")
    total = AlgebraElement()
    for k in range(upto + 1):
        total = total + p.instantiate(k)
    total = total.filter(lambda m: m.a1_degree <= depth)
    towers: Dict[Monomial, Dict[int, Fraction]] = {}
    for m, c in total.items():
        towers.setdefault(m.without_a1(), {})[m.a1_degree] = c
    rhs: Dict[Monomial, Fraction] = {}
    for base, tower in towers.items():
        values = {tower.get(j, Fraction(0)) for j in range(depth + 1)}
        if len(values) != 1:
            raise LiftError(f"{p.lhs} does not telescope on {base}", {"base": str(base)})
        rhs[base] = values.pop()
    return CaFormula(p.lhs_base, AlgebraElement(rhs), combine(p.hypothesis, p.hypothesis_at_zero))


# ==================== 符号の縮約 ====================

def collapse_element(element: AlgebraElement, context: str = "") -> AlgebraElement:
    """符号つき型の結合を焦線型の結合へ（各類の原像の係数が等しいことが条件）"""
    classes: Dict[CausticType, Dict[Monomial, Fraction]] = {}
    for m, c in element.items():
        classes.setdefault(collapse_type(m), {})[m] = c
    result: Dict[CausticType, Fraction] = {}
    for target, members in classes.items():
        coefficients = {members.get(m, Fraction(0)) for m in preimages(target)}
        if len(coefficients) != 1:
            detail = ", ".join(f"{m}: {members.get(m, 0)}" for m in preimages(target))
            raise CollapseError(f"{context}: sign classes of {target} disagree ({detail})",
                                {"lhs": context, "term": str(target)})
        result[target] = coefficients.pop()
    return AlgebraElement(result)


def collapse_signs(formulas: Iterable[CaFormula]) -> List[CaFormula]:
    """δ行を足し合わせ、符号の類をまとめた焦線型の式を作る"""
    by_lhs = {f.lhs: f for f in formulas}
    groups: Dict[CausticType, List[CaFormula]] = {}
    for f in by_lhs.values():
        groups.setdefault(collapse_type(f.lhs), []).append(f)
    collapsed = []
    for target, members in groups.items():
        missing = [str(m) for m in preimages(target) if m not in by_lhs]
        if missing:
            raise CollapseError(f"cannot collapse {target}: missing rows for {', '.join(missing)}",
                                {"lhs": str(target), "missing": missing})
        total = AlgebraElement()
        for f in members:
            total = total + f.rhs
        collapsed.append(CaFormula(
            lhs=target,
            rhs=collapse_element(total, str(target)),
            hypothesis=combine(*(f.hypothesis for f in members)),
        ))
    return sorted(collapsed, key=lambda f: f.lhs.sort_key())
