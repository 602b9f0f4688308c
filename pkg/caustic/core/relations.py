"""Linear relations between Euler characteristics: Λ_n, equation extraction and exact solving"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Tuple

from .adjacency import JTable
from .algebra import AlgebraElement, TruncationBounds, geometric_partial_sum, linear_sum
from .errors import SolveError
from .types import GENERATORS, MultisingularityType, UNIT, enumerate_types

logger = logging.getLogger(__name__)

SUPPORTED_DIMS = (3, 4, 5)


class Hypothesis(Enum):
    """コンパクト性の仮定（強さの順）"""
    H0 = "H0"  # 焦線の特異点集合がコンパクト
    H1 = "H1"  # L がコンパクト
    H2 = "H2"  # L と V がコンパクト

    @property
    def rank(self) -> int:
        return int(self.value[1])

    def __lt__(self, other: "Hypothesis") -> bool:
        return self.rank < other.rank

    def __le__(self, other: "Hypothesis") -> bool:
        return self.rank <= other.rank

    @classmethod
    def parse(cls, value) -> "Hypothesis":
        return value if isinstance(value, cls) else cls(str(value).upper())


def combine(*levels: Hypothesis) -> Hypothesis:
    return max(levels, default=Hypothesis.H0, key=lambda h: h.rank)


def equation_hypothesis(a: MultisingularityType) -> Hypothesis:
    """添字型 A の方程式が成り立つための仮定"""
    if a.is_unit():
        return Hypothesis.H2
    if a.codim == 0 or a.codim == 1:
        return Hypothesis.H1
    return Hypothesis.H0


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


# ==================== Λ_n ====================

@dataclass(frozen=True)
class PairMonomial:
    """Λ_n の単項式 (未知数側 X, 添字側 A)"""
    unknown: MultisingularityType
    index: MultisingularityType

    @property
    def codim(self) -> int:
        return self.unknown.codim

    @property
    def a1_degree(self) -> int:
        return max(self.unknown.a1_degree, self.index.a1_degree)

    @classmethod
    def unit(cls) -> "PairMonomial":
        return cls(UNIT, UNIT)

    def __mul__(self, other: "PairMonomial") -> "PairMonomial":
        return PairMonomial(self.unknown * other.unknown, self.index * other.index)

    def sort_key(self) -> Tuple:
        return (self.unknown.sort_key(), self.index.sort_key())

    def __str__(self) -> str:
        return f"<{self.unknown} | {self.index}>"


def lambda_polynomial(jtable: JTable, n: int, max_a1: int) -> AlgebraElement:
    """Λ_n = Π_g Σ_k x_g^k,  x_g = (-1)^codim(g) J(g)·g

    A1 の級数は最後に掛ける。
    """
    bounds = TruncationBounds(n, max_a1)
    ordered = [g for g in GENERATORS if not g.is_a1] + [GENERATORS[0]]
    result = AlgebraElement.monomial(PairMonomial.unit())
    for g in ordered:
        if g.codim > n:
            continue
        gm = MultisingularityType.of(g)
        x = AlgebraElement({PairMonomial(gm, a): sign(g.codim) * c
                            for a, c in jtable.j_generator(g).items()})
        series = geometric_partial_sum(x, bounds, unit=PairMonomial.unit())
        result = result.mul(series, bounds)
        logger.debug(f"Λ_{n}: multiplied series of {g} ({len(series)} terms), {len(result)} terms")
    return result


def direct_lambda(jtable: JTable, n: int, max_a1: int) -> AlgebraElement:
    """Σ_X (-1)^codim(X) J(X)·X を直接計算（Λ_n の検算用）"""
    bounds = TruncationBounds(n, max_a1)
    terms: Dict[PairMonomial, Fraction] = {}
    for x in enumerate_types(n, max_a1):
        for a, c in jtable.j_monomial(x, bounds).items():
            terms[PairMonomial(x, a)] = sign(x.codim) * c
    return AlgebraElement(terms)


# ==================== 方程式 ====================

@dataclass(frozen=True)
class Equation:
    """Σ_X c_{A,X} χ(X) = rhs_sign · χ(A)"""
    index_type: MultisingularityType
    coefficients: AlgebraElement
    rhs_sign: int
    hypothesis: Hypothesis

    @property
    def diagonal(self) -> Fraction:
        return self.coefficients.coefficient(self.index_type)

    @property
    def pivot(self) -> Fraction:
        return self.diagonal - self.rhs_sign

    def off_diagonal(self) -> AlgebraElement:
        return self.coefficients.filter(lambda x: x != self.index_type)

    def solved_form(self) -> AlgebraElement:
        """対角項を移項した χ(A) = -(1/pivot) Σ_{X≠A} c_{A,X} χ(X)"""
        return self.off_diagonal().scale(-1 / self.pivot)

    def residual(self, values: Mapping[MultisingularityType, AlgebraElement]) -> AlgebraElement:
        """各未知数に式を代入したときの左辺-右辺"""
        parts = [(c, _value(x, values)) for x, c in self.coefficients.items()]
        parts.append((-self.rhs_sign, _value(self.index_type, values)))
        return linear_sum(parts)

    def format(self) -> str:
        return f"{self.coefficients.format()} = {'-' if self.rhs_sign < 0 else ''}{self.index_type}"


def _value(x: MultisingularityType, values: Mapping[MultisingularityType, AlgebraElement]):
    found = values.get(x)
    return found if found is not None else AlgebraElement.monomial(x)


@dataclass
class RelationSystem:
    """build_system の結果"""
    dim: int
    max_a1: int
    equations: List[Equation] = field(default_factory=list)

    def __iter__(self) -> Iterator[Equation]:
        return iter(self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def __getitem__(self, index_type: MultisingularityType) -> Equation:
        for eq in self.equations:
            if eq.index_type == index_type:
                return eq
        raise KeyError(str(index_type))

    def unknowns(self) -> List[MultisingularityType]:
        return enumerate_types(self.dim, self.max_a1)

    def is_free(self, x: MultisingularityType) -> bool:
        return x.codim % 2 == self.dim % 2


def build_system(jtable: JTable, n: int, max_a1: int, method: str = "lambda") -> RelationSystem:
    """Λ_n の係数から方程式系を作る

    codim(A) ≡ n-1 (mod 2), codim(A) ≤ n-1, A1次数 ≤ K の各 A について1本。
    """
    if n not in SUPPORTED_DIMS:
        raise ValueError(f"dimension must be one of {SUPPORTED_DIMS}, got {n}")
    if max_a1 < 0:
        raise ValueError("max_a1 must be non-negative")
    if method == "lambda":
        lam = lambda_polynomial(jtable, n, max_a1)
    elif method == "direct":
        lam = direct_lambda(jtable, n, max_a1)
    else:
        raise ValueError(f"unknown method {method!r}")

    rows: Dict[MultisingularityType, Dict[MultisingularityType, Fraction]] = {}
    for pair, c in lam.items():
        a = pair.index
        if a.codim % 2 != (n - 1) % 2 or a.codim > n - 1:
            continue
        rows.setdefault(a, {})[pair.unknown] = sign(a.codim) * c

    system = RelationSystem(n, max_a1)
    for a in enumerate_types(n - 1, max_a1):
        if a.codim % 2 != (n - 1) % 2:
            continue
        system.equations.append(Equation(
            index_type=a,
            coefficients=AlgebraElement(rows.get(a, {})),
            rhs_sign=sign(n),
            hypothesis=equation_hypothesis(a),
        ))
    logger.debug(f"built system n={n} K={max_a1}: {len(system)} equations")
    return system


def relation_form(jtable: JTable, a: MultisingularityType, n: int,
                  max_a1: int) -> AlgebraElement:
    """χ(A) = ½ Σ_{X≠A} (-1)^{n-codim X} J_A(X) χ(X) を随伴指数から直接作る"""
    terms: Dict[MultisingularityType, Fraction] = {}
    for x in enumerate_types(n, max_a1):
        if x == a:
            continue
        index = jtable.adjacency_index(a, x)
        if index:
            terms[x] = Fraction(sign(n - x.codim) * index, 2)
    return AlgebraElement(terms)


# ==================== 求解 ====================

@dataclass
class SolvedFormula:
    """χ(lhs) を自由な型（codim ≡ n mod 2）の結合で表した式"""
    lhs: MultisingularityType
    rhs: AlgebraElement
    hypothesis: Hypothesis
    dim: int

    def format(self) -> str:
        return f"{self.lhs} = {self.rhs.format()}"

    def to_dict(self) -> Dict:
        return {"lhs": str(self.lhs), "rhs": self.rhs.to_json(),
                "hypothesis": self.hypothesis.value}


def solve(system: RelationSystem) -> List[SolvedFormula]:
    """codim の降順に後退代入で解く（対角以外の枢軸は使わない）"""
    n = system.dim
    solved: Dict[MultisingularityType, SolvedFormula] = {}
    order = sorted(system.equations, key=lambda eq: (-eq.index_type.codim,
                                                     eq.index_type.sort_key()))
    for eq in order:
        a = eq.index_type
        if eq.pivot != -2 * eq.rhs_sign:
            raise SolveError(f"equation for {a} has diagonal {eq.diagonal}, cannot pivot",
                             {"index_type": str(a), "diagonal": str(eq.diagonal)})
        parts = []
        hypothesis = eq.hypothesis
        for x, c in eq.off_diagonal().items():
            if x.codim <= a.codim:
                raise SolveError(
                    f"equation for {a} needs a non-diagonal pivot on {x}",
                    {"index_type": str(a), "unknown": str(x)})
            if system.is_free(x):
                parts.append((c, AlgebraElement.monomial(x)))
            else:
                dependency = solved.get(x)
                if dependency is None:
                    raise SolveError(f"equation for {a} references unsolved {x}",
                                     {"index_type": str(a), "unknown": str(x)})
                parts.append((c, dependency.rhs))
                hypothesis = combine(hypothesis, dependency.hypothesis)
        rhs = linear_sum(parts).scale(-1 / eq.pivot)
        solved[a] = SolvedFormula(a, rhs, hypothesis, n)
    logger.debug(f"solved {len(solved)} formulas for n={n}")
    return sorted(solved.values(), key=lambda f: f.lhs.sort_key())


def residuals(formulas: List[SolvedFormula],
              system: RelationSystem) -> Dict[MultisingularityType, AlgebraElement]:
    """各方程式に解を代入した残差（0でないものだけ）"""
    values = {f.lhs: f.rhs for f in formulas}
    result = {}
    for eq in system:
        residual = eq.residual(values)
        if residual:
            result[eq.index_type] = residual
    return result


def residual_check(formulas: List[SolvedFormula], system: RelationSystem) -> Fraction:
    """残差の最大絶対値（正しい解なら厳密に0）"""
    worst = Fraction(0)
    for index_type, residual in residuals(formulas, system).items():
        size = max(abs(c) for _, c in residual.items())
        logger.warning(f"nonzero residual {size} in equation for {index_type}")
        worst = max(worst, size)
    return worst
