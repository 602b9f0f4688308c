"""Mod-2 congruences and parity implication over the ca-relation lattice"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .algebra import AlgebraElement
from .errors import CongruenceError
from .formulas import CaFormula
from .lattice import GF2Span, IntegerLattice, LatticeWitness, bits_of, indices_of, verify_witness
from .relations import Hypothesis
from .types import Monomial, MixedType, enumerate_types

logger = logging.getLogger(__name__)


class Verdict(Enum):
    IMPLIED = "IMPLIED"
    NOT_IMPLIED = "NOT_IMPLIED"


@dataclass(frozen=True)
class Congruence:
    """Σ support ≡ 0 (mod 2)"""
    support: FrozenSet[Monomial]
    source: str = ""

    def ordered(self) -> List[Monomial]:
        return sorted(self.support, key=lambda m: m.sort_key())

    def format(self) -> str:
        if not self.support:
            return "0 ≡ 0"
        return " + ".join(str(m) for m in self.ordered()) + " ≡ 0"

    @classmethod
    def from_element(cls, element: AlgebraElement, source: str = "") -> "Congruence":
        """整数係数の式の奇数係数の項"""
        for m, c in element.items():
            if c.denominator != 1:
                raise CongruenceError(f"coefficient {c} of {m} is not an integer",
                                      {"term": str(m), "coeff": str(c)})
        return cls(frozenset(m for m, c in element.items() if c.numerator % 2), source)


def raw_congruences(ca_formulas: Iterable[CaFormula],
                    hypothesis: Hypothesis = Hypothesis.H0) -> List[Congruence]:
    """半整数係数の項の和 ≡ 0 を各式から取り出す"""
    result = []
    for f in ca_formulas:
        if f.hypothesis.rank > hypothesis.rank:
            continue
        odd = []
        for m, c in f.rhs.items():
            if c.denominator not in (1, 2):
                raise CongruenceError(
                    f"{f.lhs}: coefficient {c} of {m} has denominator {c.denominator}",
                    {"lhs": str(f.lhs), "term": str(m), "coeff": str(c)})
            if c.denominator == 2:
                odd.append(m)
        if odd:
            result.append(Congruence(frozenset(odd), source=str(f.lhs)))
    logger.debug(f"{len(result)} raw congruences at {hypothesis.value}")
    return result


@dataclass
class GF2Result:
    implied: bool
    witness: List[Congruence] = field(default_factory=list)


def _variables(congruences: Iterable[Congruence]) -> List[Monomial]:
    found = set()
    for c in congruences:
        found |= c.support
    return sorted(found, key=lambda m: m.sort_key())


def gf2_span(base: Sequence[Congruence],
             variables: Optional[List[Monomial]] = None) -> Tuple[GF2Span, Dict[Monomial, int]]:
    variables = variables if variables is not None else _variables(base)
    index = {m: i for i, m in enumerate(variables)}
    span = GF2Span()
    for c in base:
        span.insert(bits_of(index[m] for m in c.support))
    return span, index


def gf2_witness(base: Sequence[Congruence], target: Congruence) -> GF2Result:
    """target が base の GF(2) 線形結合か判定し、使った合同式を返す"""
    variables = _variables(list(base) + [target])
    span, index = gf2_span(base, variables)
    implied, witness = span.contains(bits_of(index[m] for m in target.support))
    if not implied:
        return GF2Result(False)
    return GF2Result(True, [base[i] for i in indices_of(witness)])


def gf2_implies(base: Sequence[Congruence], target: Congruence) -> bool:
    return gf2_witness(base, target).implied


def reduced_basis(base: Sequence[Congruence]) -> List[Congruence]:
    """簡約された GF(2) 基底（型の順序で枢軸を選ぶ）"""
    variables = _variables(base)
    span, _ = gf2_span(base, variables)
    return [Congruence(frozenset(variables[i] for i in indices_of(vec)),
                       source=" + ".join(base[j].source for j in indices_of(wit)))
            for vec, wit in span.reduced_basis()]


# ==================== 整数格子 ====================

@dataclass
class RelationRow:
    vector: AlgebraElement
    hypothesis: Hypothesis
    label: str


class RelationLattice:
    """A1なしの ca 量を変数とする関係式の格子"""

    def __init__(self, variables: List[Monomial], rows: List[RelationRow]):
        self.variables = variables
        self.rows = rows
        self._index = {m: i for i, m in enumerate(variables)}
        self._lattices: Dict[Hypothesis, Tuple[List[RelationRow], IntegerLattice]] = {}

    @classmethod
    def from_ca_formulas(cls, formulas: Iterable[CaFormula], dim: int = 5) -> "RelationLattice":
        rows = [RelationRow(f.relation(), f.hypothesis, str(f.lhs)) for f in formulas]
        return cls(enumerate_types(dim, 0), rows)

    def vector(self, element: AlgebraElement) -> List[Fraction]:
        values = [Fraction(0)] * len(self.variables)
        for m, c in element.items():
            if m not in self._index:
                raise KeyError(f"{m} is not a variable of this lattice")
            values[self._index[m]] = c
        return values

    def at(self, hypothesis: Hypothesis) -> Tuple[List[RelationRow], IntegerLattice]:
        """指定の仮定以下で成り立つ行だけの格子"""
        if hypothesis not in self._lattices:
            rows = [r for r in self.rows if r.hypothesis.rank <= hypothesis.rank]
            lattice = IntegerLattice([self.vector(r.vector) for r in rows], len(self.variables))
            self._lattices[hypothesis] = (rows, lattice)
        return self._lattices[hypothesis]


@dataclass
class OracleResult:
    """divisibility_oracle の結果"""
    verdict: Verdict
    modulus: int
    hypothesis: Optional[Hypothesis] = None
    combination: Dict[str, Fraction] = field(default_factory=dict)
    quotient: Dict[str, int] = field(default_factory=dict)
    verified: bool = False

    @property
    def implied(self) -> bool:
        return self.verdict is Verdict.IMPLIED

    def headline(self) -> str:
        if self.implied:
            return f"IMPLIED ({self.hypothesis.value})"
        return "NOT_IMPLIED (not forced by the relations; no counterexample claimed)"

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict.value,
            "modulus": self.modulus,
            "hypothesis": self.hypothesis.value if self.hypothesis else None,
            "witness": {
                "combination": {k: f"{v.numerator}/{v.denominator}"
                                for k, v in self.combination.items()},
                "quotient": dict(self.quotient),
                "verified": self.verified,
            },
        }


def divisibility_oracle(lattice: RelationLattice, ell: AlgebraElement, d: int,
                        hypothesis: Hypothesis = Hypothesis.H0,
                        escalate: bool = False) -> OracleResult:
    """ℓ(v) ∈ dℤ が全ての整数解 v で成り立つかを判定する

    escalate=True なら hypothesis から順に強い仮定を試し、最初に成り立った水準を報告する。
    """
    if d < 1:
        raise ValueError("modulus must be a positive integer")
    vector = lattice.vector(ell)
    levels = [h for h in Hypothesis if h.rank >= hypothesis.rank] if escalate else [hypothesis]
    for level in levels:
        rows, integer_lattice = lattice.at(level)
        witness = integer_lattice.membership(vector, d)
        if witness is None:
            continue
        if level is not hypothesis:
            logger.warning(f"statement needs {level.value} rows (requested {hypothesis.value})")
        return _implied(lattice, rows, vector, d, level, witness)
    return OracleResult(Verdict.NOT_IMPLIED, d)


def _implied(lattice: RelationLattice, rows: List[RelationRow], vector: List[Fraction], d: int,
             level: Hypothesis, witness: LatticeWitness) -> OracleResult:
    row_vectors = [lattice.vector(r.vector) for r in rows]
    verified = verify_witness(row_vectors, vector, d, witness)
    if not verified:
        logger.error("lattice witness failed re-substitution")
    return OracleResult(
        verdict=Verdict.IMPLIED,
        modulus=d,
        hypothesis=level,
        combination={r.label: lam for r, lam in zip(rows, witness.combination) if lam},
        quotient={str(m): z for m, z in zip(lattice.variables, witness.quotient) if z},
        verified=verified,
    )


# ==================== 命題 ====================

def expand_statement(element: AlgebraElement) -> AlgebraElement:
    """符号なしの記号を符号つきの和に展開する"""
    terms: Dict[Monomial, Fraction] = {}
    for m, c in element.items():
        expanded = m.expand() if isinstance(m, MixedType) else [m]
        for signed in expanded:
            terms[signed] = terms.get(signed, 0) + c
    return AlgebraElement(terms)


@dataclass
class ParityStatement:
    """「ℓ は d で割り切れる」という命題"""
    text: str
    element: AlgebraElement
    modulus: int = 2
    dim: int = 5
    source: str = ""
    hypothesis: Hypothesis = Hypothesis.H0
    expected: Verdict = Verdict.IMPLIED

    def expectation(self) -> str:
        if self.expected is Verdict.NOT_IMPLIED:
            return Verdict.NOT_IMPLIED.value
        return f"IMPLIED ({self.hypothesis.value})"


@dataclass
class ParityCheck:
    statement: ParityStatement
    result: OracleResult

    @property
    def as_expected(self) -> bool:
        """一覧の期待値どおりか（IMPLIED なら水準と witness の検算も一致すること）"""
        result = self.result
        if self.statement.expected is Verdict.NOT_IMPLIED:
            return not result.implied
        return (result.implied and result.verified
                and result.hypothesis is self.statement.hypothesis)

    @property
    def discrepancy(self) -> bool:
        """一覧では偶数とされるが関係式からは従わない命題"""
        return self.statement.expected is Verdict.NOT_IMPLIED

    def outcome(self) -> str:
        result = self.result
        if not result.implied:
            return Verdict.NOT_IMPLIED.value
        suffix = "" if result.verified else " (witness failed)"
        return f"IMPLIED ({result.hypothesis.value}){suffix}"

    def to_dict(self) -> Dict:
        data = {"statement": self.statement.text, "dim": self.statement.dim,
                "source": self.statement.source, "expected": self.statement.expectation(),
                "as_expected": self.as_expected}
        data.update(self.result.to_dict())
        return data


def check_statement(lattice: RelationLattice, statement: ParityStatement,
                    hypothesis: Hypothesis = Hypothesis.H2) -> ParityCheck:
    """H0 から hypothesis まで順に試す"""
    ell = expand_statement(statement.element)
    result = None
    for level in Hypothesis:
        if level.rank > hypothesis.rank:
            break
        result = divisibility_oracle(lattice, ell, statement.modulus, level)
        if result.implied:
            break
    return ParityCheck(statement, result)


def report_isolated_point_parities(lattice: RelationLattice,
                                   statements: Sequence[ParityStatement]) -> List[ParityCheck]:
    """孤立点の個数の偶奇（n=5）の各命題を判定する"""
    checks = [check_statement(lattice, s) for s in statements if s.dim == 5]
    for c in checks:
        logger.debug(f"{c.statement.text}: {c.result.headline()}")
    return checks


def dimension_checks(lattices: Dict[int, RelationLattice],
                     statements: Sequence[ParityStatement]) -> List[ParityCheck]:
    """n=3, 4 の古典的な偶奇"""
    return [check_statement(lattices[s.dim], s) for s in statements if s.dim in (3, 4)]


@dataclass
class CongruenceCheck:
    target: Congruence
    implied: bool
    hypothesis: Optional[Hypothesis]
    witness: List[Congruence] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "congruence": self.target.format(),
            "implied": self.implied,
            "hypothesis": self.hypothesis.value if self.hypothesis else None,
            "witness": [w.source for w in self.witness],
        }


def check_congruences(ca_formulas: Sequence[CaFormula],
                      targets: Sequence[Congruence]) -> List[CongruenceCheck]:
    """各合同式が生の合同式の GF(2) 張る空間に入るか（最も弱い仮定から）"""
    by_level = {h: raw_congruences(ca_formulas, h) for h in Hypothesis}
    checks = []
    for target in targets:
        check = CongruenceCheck(target, False, None)
        for level in Hypothesis:
            result = gf2_witness(by_level[level], target)
            if result.implied:
                check = CongruenceCheck(target, True, level, result.witness)
                if level is not Hypothesis.H0:
                    logger.warning(f"{target.format()} requires {level.value} rows, not H0")
                break
        checks.append(check)
    return checks
