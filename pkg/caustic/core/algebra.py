"""Exact rational semigroup algebra with graded truncation"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import TruncationError
from .types import MAX_CLASSIFIED_CODIM, MultisingularityType

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class TruncationBounds:
    """次数の打ち切り (codim ≤ max_codim, A1次数 ≤ max_a1)"""
    max_codim: int
    max_a1: int

    def __post_init__(self):
        if not 0 <= self.max_codim <= MAX_CLASSIFIED_CODIM:
            raise ValueError(f"max_codim must be in 0..{MAX_CLASSIFIED_CODIM}, got {self.max_codim}")
        if self.max_a1 < 0:
            raise ValueError(f"max_a1 must be non-negative, got {self.max_a1}")

    def admits(self, m: Any) -> bool:
        return m.codim <= self.max_codim and m.a1_degree <= self.max_a1

    def dominates(self, other: "TruncationBounds") -> bool:
        return self.max_codim >= other.max_codim and self.max_a1 >= other.max_a1


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class AlgebraElement:
    """単項式の有理係数有限線形結合

    係数0の項は保持しない。値として扱い、生成後に変更しない。
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Hashable, Rational]] = None):
        cleaned: Dict[Hashable, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                cleaned[m] = c
        self._terms = cleaned

    # ==================== 生成 ====================

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls()

    @classmethod
    def monomial(cls, m: Hashable, coeff: Rational = 1) -> "AlgebraElement":
        return cls({m: coeff})

    @classmethod
    def one(cls, monomial_cls=MultisingularityType) -> "AlgebraElement":
        return cls({monomial_cls.unit(): 1})

    @classmethod
    def _from_clean(cls, terms: Dict[Hashable, Fraction]) -> "AlgebraElement":
        element = cls.__new__(cls)
        element._terms = {m: c for m, c in terms.items() if c}
        return element

    # ==================== 参照 ====================

    @property
    def terms(self) -> Mapping[Hashable, Fraction]:
        return dict(self._terms)

    def coefficient(self, m: Hashable) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def support(self) -> List[Hashable]:
        return sorted(self._terms, key=lambda m: m.sort_key())

    def items(self) -> List[Tuple[Hashable, Fraction]]:
        """決定的な順序（codim, A1次数, 指数）で項を返す"""
        return [(m, self._terms[m]) for m in self.support()]

    def __iter__(self) -> Iterator[Tuple[Hashable, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlgebraElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    __hash__ = None

    # ==================== 演算 ====================

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        result = dict(self._terms)
        for m, c in other._terms.items():
            result[m] = result.get(m, 0) + c
        return AlgebraElement._from_clean(result)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement._from_clean({m: -c for m, c in self._terms.items()})

    def scale(self, factor: Rational) -> "AlgebraElement":
        factor = Fraction(factor)
        return AlgebraElement._from_clean({m: c * factor for m, c in self._terms.items()})

    def mul(self, other: "AlgebraElement",
            bounds: Optional[TruncationBounds] = None) -> "AlgebraElement":
        """打ち切り付きの積（bounds=None なら打ち切らない）"""
        result: Dict[Hashable, Fraction] = {}
        limit = bounds.max_codim if bounds else None
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                if limit is not None and m1.codim + m2.codim > limit:
                    continue
                m = m1 * m2
                if bounds is not None and not bounds.admits(m):
                    continue
                result[m] = result.get(m, 0) + c1 * c2
        return AlgebraElement._from_clean(result)

    def __mul__(self, other: Union["AlgebraElement", Rational]) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def truncate(self, bounds: TruncationBounds) -> "AlgebraElement":
        return AlgebraElement._from_clean(
            {m: c for m, c in self._terms.items() if bounds.admits(m)})

    def map_keys(self, fn) -> "AlgebraElement":
        """単項式を写して係数を集約する"""
        result: Dict[Hashable, Fraction] = {}
        for m, c in self._terms.items():
            key = fn(m)
            result[key] = result.get(key, 0) + c
        return AlgebraElement._from_clean(result)

    def filter(self, predicate) -> "AlgebraElement":
        return AlgebraElement._from_clean(
            {m: c for m, c in self._terms.items() if predicate(m)})

    # ==================== 出力 ====================

    def format(self) -> str:
        """式DSLの符号付き項の列として出力"""
        if not self._terms:
            return "0"
        parts: List[str] = []
        for m, c in self.items():
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            text = str(m)
            if magnitude != 1:
                text = f"{format_coefficient(magnitude)}*{text}"
            if not parts:
                parts.append(text if sign == "+" else f"-{text}")
            else:
                parts.append(f"{sign} {text}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"AlgebraElement({self.format()!r})"

    def to_json(self) -> List[Dict[str, str]]:
        return [{"type": str(m), "coeff": f"{c.numerator}/{c.denominator}"}
                for m, c in self.items()]


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a + b


def mul(a: AlgebraElement, b: AlgebraElement, bounds: TruncationBounds) -> AlgebraElement:
    return a.mul(b, bounds)


def linear_sum(elements: Iterable[Tuple[Rational, AlgebraElement]]) -> AlgebraElement:
    """Σ c_i e_i を一度に集約する"""
    result: Dict[Hashable, Fraction] = {}
    for factor, element in elements:
        factor = Fraction(factor)
        if not factor:
            continue
        for m, c in element._terms.items():
            result[m] = result.get(m, 0) + factor * c
    return AlgebraElement._from_clean(result)


def geometric_partial_sum(x: AlgebraElement, bounds: TruncationBounds,
                          unit: Optional[Hashable] = None) -> AlgebraElement:
    """Σ_{k≥0} x^k を打ち切りの範囲で計算する

    各項は codim か A1次数を真に増やす必要がある（単位元を含むと級数が終わらない）。
    """
    for m in x.support():
        if m.codim == 0 and m.a1_degree == 0:
            raise TruncationError(
                f"geometric series of an element containing {m} does not terminate",
                {"term": str(m)})
    if unit is None:
        unit = next(iter(x.support()), MultisingularityType.unit()).unit()
    x = x.truncate(bounds)
    total = AlgebraElement.monomial(unit)
    power = total
    steps = 0
    while True:
        power = power.mul(x, bounds)
        if not power:
            break
        total = total + power
        steps += 1
    logger.debug(f"geometric series terminated after {steps} powers ({len(total)} terms)")
    return total
