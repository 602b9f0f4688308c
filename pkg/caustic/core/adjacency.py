"""Adjacency homomorphism J: generator table, multiplicative extension, validation"""
import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .algebra import AlgebraElement, TruncationBounds
from .dsl import parse_file
from .errors import JTableError, UnclassifiedTypeError
from .types import (
    GENERATORS, MAX_CLASSIFIED_CODIM, Generator, MultisingularityType, UNIT,
)

logger = logging.getLogger(__name__)

DEFAULT_JTABLE = Path(__file__).parent.parent.parent / "data" / "jtable.txt"


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    """J表の検証結果"""
    checks: List[ValidationCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, problems: List[str]):
        self.checks.append(ValidationCheck(name, not problems, "; ".join(problems)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                       for c in self.checks],
        }


class JTable:
    """生成元上の J の値（変更不可）と単項式への乗法的拡張"""

    def __init__(self, entries: Dict[Generator, AlgebraElement], source: str = ""):
        self._entries = dict(entries)
        self.source = source
        self._cache: Dict[MultisingularityType, Tuple[TruncationBounds, AlgebraElement]] = {}
        self._lock = threading.Lock()
        self.cache_hits = 0

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "JTable":
        """J表ファイルを読み込む"""
        path = Path(path) if path else DEFAULT_JTABLE
        if not path.exists():
            raise JTableError(f"J table not found: {path}", {"path": str(path)})
        entries: Dict[Generator, AlgebraElement] = {}
        for row in parse_file(path):
            if row.kind != "jtable":
                raise JTableError(f"{path.name}:{row.line}: expected a J(...) line",
                                  {"line": row.line})
            if row.generator is None:
                continue
            if row.generator in entries:
                raise JTableError(f"{path.name}:{row.line}: duplicate entry for J({row.generator})",
                                  {"line": row.line, "generator": row.generator.token})
            entries[row.generator] = row.rhs
        logger.debug(f"loaded {len(entries)} J entries from {path}")
        return cls(entries, source=str(path))

    @property
    def entries(self) -> Dict[Generator, AlgebraElement]:
        return dict(self._entries)

    def j_generator(self, g: Generator) -> AlgebraElement:
        try:
            return self._entries[g]
        except KeyError:
            raise JTableError(f"J table has no entry for {g.token}", {"generator": g.token})

    def j_monomial(self, x: MultisingularityType, bounds: TruncationBounds) -> AlgebraElement:
        """J(X) = Π J(g)^e を打ち切り付きで計算（メモ化）"""
        if x.codim > MAX_CLASSIFIED_CODIM:
            raise UnclassifiedTypeError(f"unclassified type {x} (codim {x.codim} > 5)",
                                        {"type": str(x), "codim": x.codim})
        cached = self._cache.get(x)
        if cached is not None and cached[0].dominates(bounds):
            self.cache_hits += 1
            element = cached[1]
            return element if cached[0] == bounds else element.truncate(bounds)
        if x.is_unit():
            result = AlgebraElement.monomial(UNIT).truncate(bounds)
        else:
            index = next(i for i, e in enumerate(x.exponents) if e)
            g = GENERATORS[index]
            exps = list(x.exponents)
            exps[index] -= 1
            rest = MultisingularityType(tuple(exps))
            result = self.j_monomial(rest, bounds).mul(self.j_generator(g), bounds)
        with self._lock:
            current = self._cache.get(x)
            if current is None or not current[0].dominates(bounds):
                self._cache[x] = (bounds, result)
        return result

    def adjacency_index(self, a: MultisingularityType, x: MultisingularityType) -> int:
        """J_A(X) = (-1)^codim(A) · (J(X) における A の係数)

        A = X のときは 1（対角の約束）。
        """
        if x.codim > MAX_CLASSIFIED_CODIM:
            raise UnclassifiedTypeError(f"unclassified type {x} (codim {x.codim} > 5)",
                                        {"type": str(x), "codim": x.codim})
        if a.codim > x.codim or a.a1_degree < x.a1_degree:
            return 0
        bounds = TruncationBounds(MAX_CLASSIFIED_CODIM, a.a1_degree)
        coeff = self.j_monomial(x, bounds).coefficient(a)
        value = coeff if a.codim % 2 == 0 else -coeff
        if value.denominator != 1:
            raise JTableError(f"non-integer adjacency index J_{a}({x}) = {value}")
        return int(value)

    # ==================== 検証 ====================

    def validate(self) -> ValidationReport:
        """J表の構造チェック"""
        report = ValidationReport()
        missing = [g.token for g in GENERATORS if g not in self._entries]
        report.add("entries", [f"missing J({t})" for t in missing])

        a1 = GENERATORS[0]
        a1_problems = []
        if a1 in self._entries and self._entries[a1] != AlgebraElement.monomial(
                MultisingularityType.of(a1)):
            a1_problems.append(f"J(A1) = {self._entries[a1]}")
        report.add("j_a1", a1_problems)

        codim_problems, sign_problems, integer_problems, a1_monotone = [], [], [], []
        bounds = TruncationBounds(MAX_CLASSIFIED_CODIM, 12)
        for g, image in self._entries.items():
            for m, c in image.items():
                if m.codim > g.codim:
                    codim_problems.append(f"J({g}) has term {m} of codim {m.codim}")
                if c.denominator != 1:
                    integer_problems.append(f"J({g}) has coefficient {c} on {m}")
            expected = Fraction((-1) ** g.codim)
            gm = MultisingularityType.of(g)
            if image.coefficient(gm) != expected:
                sign_problems.append(
                    f"coefficient of {g} in J({g}) is {image.coefficient(gm)}, expected {expected}")
            if a1 in self._entries:
                shifted = gm.with_a1(gm.a1_degree + 2)
                for m, _ in self.j_monomial(shifted, bounds).items():
                    if m.a1_degree < shifted.a1_degree:
                        a1_monotone.append(f"J({shifted}) has term {m}")
        report.add("codim_monotone", codim_problems)
        report.add("a1_monotone", a1_monotone)
        report.add("diagonal_sign", sign_problems)
        report.add("integer_coefficients", integer_problems)
        for check in report.failures():
            logger.warning(f"J table check {check.name} failed: {check.detail}")
        return report


def validate_jtable(table: Optional[JTable] = None) -> ValidationReport:
    return (table or JTable.load()).validate()
