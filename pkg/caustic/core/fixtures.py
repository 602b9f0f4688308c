"""Fixture loading, exact comparison and end-to-end verification"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .adjacency import JTable
from .algebra import AlgebraElement, format_coefficient
from .dsl import ParsedRow, parse_file
from .engine import RelationEngine
from .errors import CausticError, ErrorCode, FixtureError
from .formulas import CaFormula, ParametricFormula, collapse_signs, telescope
from .parity import (
    Congruence, ParityStatement, Verdict, check_congruences, dimension_checks,
    report_isolated_point_parities,
)
from .relations import Hypothesis

logger = logging.getLogger(__name__)

DEFAULT_FIXTURE_DIR = Path(__file__).parent.parent.parent / "data"

FIXTURE_FILES = {
    "jtable": "jtable.txt",
    "parametric": "relations.txt",
    "ca": "relations_ca.txt",
    "collapsed": "relations_collapsed.txt",
    "congruences": "congruences.txt",
    "parities": "parities.txt",
}

# (行の族の数, δ展開後の行数)
EXPECTED_COUNTS = {
    "parametric": (11, 17),
    "ca": (11, 17),
    "collapsed": (10, 11),
    "congruences": (9, 10),
    "parities": (10, 10),
}
EXPECTED_J_ENTRIES = 16
EXPECTED_ISOLATED_POINT_STATEMENTS = 5

TELESCOPE_DEPTH = 40


@dataclass
class FixtureSet:
    """フィクスチャ一式（各行は出典タグと仮定つき）"""
    path: Path
    jtable: JTable
    parametric: List[ParametricFormula] = field(default_factory=list)
    ca: List[CaFormula] = field(default_factory=list)
    collapsed: List[CaFormula] = field(default_factory=list)
    congruences: List[Congruence] = field(default_factory=list)
    statements: List[ParityStatement] = field(default_factory=list)
    sources: Dict[str, List[str]] = field(default_factory=dict)


# ==================== 読み込み ====================

def _families(rows: Sequence[ParsedRow]) -> int:
    return len({(r.directives.source, r.line) for r in rows})


def _check_count(section: str, rows: Sequence[ParsedRow]):
    expected = EXPECTED_COUNTS[section]
    actual = (_families(rows), len(rows))
    if actual != expected:
        raise FixtureError(
            f"{FIXTURE_FILES[section]}: expected {expected[0]} families / {expected[1]} rows, "
            f"found {actual[0]} / {actual[1]}",
            {"section": section, "expected": list(expected), "actual": list(actual)},
            code=ErrorCode.FIXTURE_COUNT_MISMATCH)


def _relation_rows(rows: Sequence[ParsedRow], name: str) -> List[ParsedRow]:
    for row in rows:
        if row.kind != "relation":
            raise FixtureError(f"{name}:{row.line}: expected 'lhs = rhs'", {"line": row.line})
    return list(rows)


def to_parametric(row: ParsedRow) -> ParametricFormula:
    lhs = row.lhs_key
    if getattr(lhs, "shift", None) != 0:
        raise FixtureError(f"line {row.line}: left-hand side must be B A1^{{k}}", {"line": row.line})
    return ParametricFormula(
        lhs_base=lhs.base,
        terms=row.rhs,
        hypothesis=Hypothesis.parse(row.hypothesis),
        hypothesis_at_zero=Hypothesis.parse(row.hypothesis_at_zero),
        dim=row.directives.dim or 5,
    )


def to_ca(row: ParsedRow) -> CaFormula:
    return CaFormula(row.lhs_key, row.rhs, Hypothesis.parse(row.hypothesis))


def to_congruence(row: ParsedRow) -> Congruence:
    if row.directives.modulus != 2:
        raise FixtureError(f"line {row.line}: congruences need @modulus 2", {"line": row.line})
    return Congruence.from_element(row.lhs - row.rhs, source=row.text)


def to_statement(row: ParsedRow) -> ParityStatement:
    if row.kind != "statement":
        raise FixtureError(f"line {row.line}: a parity statement has no '='", {"line": row.line})
    return ParityStatement(
        text=row.text,
        element=row.rhs,
        modulus=row.directives.modulus or 2,
        dim=row.directives.dim or 5,
        source=row.directives.source,
        hypothesis=Hypothesis.parse(row.hypothesis),
        expected=Verdict(row.directives.expect),
    )


def load_fixtures(path: Union[str, Path, None] = None) -> FixtureSet:
    """フィクスチャのディレクトリを読み込み、件数を確認する"""
    path = Path(path) if path else DEFAULT_FIXTURE_DIR
    if not path.is_dir():
        raise FixtureError(f"fixture directory not found: {path}", {"path": str(path)})
    missing = [name for name in FIXTURE_FILES.values() if not (path / name).exists()]
    if missing:
        raise FixtureError(f"missing fixture files in {path}: {', '.join(missing)}",
                           {"path": str(path), "missing": missing})

    jtable = JTable.load(path / FIXTURE_FILES["jtable"])
    if len(jtable.entries) != EXPECTED_J_ENTRIES:
        raise FixtureError(f"expected {EXPECTED_J_ENTRIES} J entries, found {len(jtable.entries)}",
                           {"section": "jtable"}, code=ErrorCode.FIXTURE_COUNT_MISMATCH)

    parsed = {section: parse_file(path / name) for section, name in FIXTURE_FILES.items()
              if section != "jtable"}
    for section, rows in parsed.items():
        _check_count(section, rows)

    statements = [to_statement(r) for r in parsed["parities"]]
    isolated = sum(1 for s in statements if s.dim == 5)
    if isolated != EXPECTED_ISOLATED_POINT_STATEMENTS:
        raise FixtureError(f"expected {EXPECTED_ISOLATED_POINT_STATEMENTS} statements for n=5, "
                           f"found {isolated}", {"section": "parities"},
                           code=ErrorCode.FIXTURE_COUNT_MISMATCH)

    fixtures = FixtureSet(
        path=path,
        jtable=jtable,
        parametric=[to_parametric(r) for r in _relation_rows(parsed["parametric"], "relations.txt")],
        ca=[to_ca(r) for r in _relation_rows(parsed["ca"], "relations_ca.txt")],
        collapsed=[to_ca(r) for r in _relation_rows(parsed["collapsed"], "relations_collapsed.txt")],
        congruences=[to_congruence(r) for r in
                     _relation_rows(parsed["congruences"], "congruences.txt")],
        statements=statements,
        sources={section: sorted({r.directives.source for r in rows})
                 for section, rows in parsed.items()},
    )
    logger.debug(f"loaded fixtures from {path}")
    return fixtures


# ==================== 比較 ====================

@dataclass
class Diff:
    """1つの (左辺, 項) の不一致"""
    section: str
    lhs: str
    term: str
    expected: Optional[str]
    actual: Optional[str]

    def to_dict(self) -> Dict[str, Any]:
        return {"section": self.section, "lhs": self.lhs, "term": self.term,
                "expected": self.expected, "actual": self.actual}

    def format(self) -> str:
        return (f"[{self.section}] {self.lhs}: {self.term} "
                f"expected {self.expected}, got {self.actual}")


def _coefficient(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else format_coefficient(value)


def _body(formula) -> AlgebraElement:
    return formula.terms if isinstance(formula, ParametricFormula) else formula.rhs


def _hypotheses(formula) -> List[Tuple[str, Hypothesis]]:
    tags = [("@requires", formula.hypothesis)]
    if isinstance(formula, ParametricFormula):
        tags.append(("@requires k0", formula.hypothesis_at_zero))
    return tags


def compare_elements(section: str, lhs: str, derived: AlgebraElement,
                     fixture: AlgebraElement) -> List[Diff]:
    diffs = []
    keys = set(derived.terms) | set(fixture.terms)
    for key in sorted(keys, key=lambda m: m.sort_key()):
        a, e = derived.coefficient(key), fixture.coefficient(key)
        if a != e:
            diffs.append(Diff(section, lhs, str(key), _coefficient(e), _coefficient(a)))
    return diffs


def compare(derived: Iterable, fixture: Iterable, mode: str) -> List[Diff]:
    """左辺ごとに係数と仮定を厳密に比較する（順序は問わない）

    mode は出力の section 名になる。片側にしかない左辺も差分として報告する。
    """
    derived_by = {str(f.lhs): f for f in derived}
    fixture_by = {str(f.lhs): f for f in fixture}
    diffs: List[Diff] = []
    for lhs in sorted(set(derived_by) | set(fixture_by)):
        d, f = derived_by.get(lhs), fixture_by.get(lhs)
        if d is None:
            diffs.append(Diff(mode, lhs, "<row>", "present", None))
            continue
        if f is None:
            diffs.append(Diff(mode, lhs, "<row>", None, "present"))
            continue
        diffs.extend(compare_elements(mode, lhs, _body(d), _body(f)))
        for (tag, actual), (_, expected) in zip(_hypotheses(d), _hypotheses(f)):
            if actual is not expected:
                diffs.append(Diff(mode, lhs, tag, expected.value, actual.value))
    return diffs


# ==================== 検証 ====================

@dataclass
class SectionResult:
    name: str
    diffs: List[Diff] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    discrepancies: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.diffs


@dataclass
class VerificationReport:
    """verify の結果（全ての section が空の差分なら成功）"""
    dim: int
    a1_max: int
    sections: List[SectionResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.passed for s in self.sections)

    def diffs(self) -> List[Diff]:
        return [d for s in self.sections for d in s.diffs]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "dim": self.dim,
            "a1_max": self.a1_max,
            "sections": [{"name": s.name, "passed": s.passed, "notes": s.notes,
                          "discrepancies": s.discrepancies}
                         for s in self.sections],
            "diffs": [d.to_dict() for d in self.diffs()],
        }


def _guarded(report: VerificationReport, name: str, run) -> None:
    section = SectionResult(name)
    try:
        run(section)
    except CausticError as e:
        section.diffs.append(Diff(name, "<error>", e.code.name, None, e.message))
    report.sections.append(section)
    logger.debug(f"verify {name}: {'ok' if section.passed else f'{len(section.diffs)} diffs'}")


def verify_all(fixtures: FixtureSet, dim: int = 5, a1_max: int = 12,
               engine: Optional[RelationEngine] = None) -> VerificationReport:
    """導出を全て実行し、フィクスチャと自己検算の結果をまとめる"""
    engine = engine or RelationEngine(fixtures.jtable, a1_max)
    report = VerificationReport(dim, a1_max)

    def jtable(section: SectionResult):
        for check in engine.jtable.validate().failures():
            section.diffs.append(Diff(section.name, "J", check.name, "pass", check.detail))

    def residual(section: SectionResult):
        worst = engine.residual(dim, a1_max)
        if worst:
            section.diffs.append(Diff(section.name, f"n={dim}", "max |residual|", "0", str(worst)))

    _guarded(report, "jtable", jtable)
    _guarded(report, "residual", residual)

    if dim == 5:
        _verify_five(engine, fixtures, a1_max, report)
    else:
        def classical(section: SectionResult):
            lattices = {dim: engine.lattice(dim, a1_max)}
            targets = [s for s in fixtures.statements if s.dim == dim]
            for check in dimension_checks(lattices, targets):
                _parity_diff(section, check)

        _guarded(report, f"parity-n{dim}", classical)
    return report


def _parity_diff(section: SectionResult, check):
    if not check.as_expected:
        section.diffs.append(Diff(section.name, check.statement.text, "verdict",
                                  check.statement.expectation(), check.outcome()))
    elif check.discrepancy:
        section.discrepancies.append(f"{check.statement.text}: {check.result.headline()}")
    else:
        section.notes.append(f"{check.statement.text}: {check.result.headline()}")


def _verify_five(engine: RelationEngine, fixtures: FixtureSet, a1_max: int,
                 report: VerificationReport):
    def parametric(section: SectionResult):
        section.diffs.extend(compare(engine.parametric(5, a1_max), fixtures.parametric,
                                     section.name))

    def per_k(section: SectionResult):
        by_base = {p.lhs_base: p for p in fixtures.parametric}
        for formula in engine.solved(5, a1_max):
            p = by_base.get(formula.lhs.without_a1())
            if p is None:
                continue
            k = formula.lhs.a1_degree
            section.diffs.extend(compare_elements(section.name, str(formula.lhs),
                                                  formula.rhs, p.instantiate(k)))
            if formula.hypothesis is not p.hypothesis_for(k):
                section.diffs.append(Diff(section.name, str(formula.lhs), "@requires",
                                          p.hypothesis_for(k).value, formula.hypothesis.value))

    def ca(section: SectionResult):
        section.diffs.extend(compare(engine.ca(5, a1_max), fixtures.ca, section.name))

    def collapsed(section: SectionResult):
        section.diffs.extend(compare(engine.collapsed(a1_max), fixtures.collapsed, section.name))

    def telescoping(section: SectionResult):
        summed = [telescope(p, TELESCOPE_DEPTH) for p in fixtures.parametric]
        section.diffs.extend(compare(summed, fixtures.ca, section.name))

    def collapse_of_fixtures(section: SectionResult):
        section.diffs.extend(compare(collapse_signs(fixtures.ca), fixtures.collapsed,
                                     section.name))

    def congruences(section: SectionResult):
        for check in check_congruences(engine.ca(5, a1_max), fixtures.congruences):
            if not check.implied or check.hypothesis is not Hypothesis.H0:
                actual = check.hypothesis.value if check.implied else "not in span"
                section.diffs.append(Diff(section.name, check.target.source, "span", "H0", actual))
            else:
                witness = " + ".join(w.source for w in check.witness)
                section.notes.append(f"{check.target.format()} <= {witness}")

    def isolated_points(section: SectionResult):
        lattice = engine.lattice(5, a1_max)
        for check in report_isolated_point_parities(lattice, fixtures.statements):
            _parity_diff(section, check)

    def classical(section: SectionResult):
        lattices = {n: engine.lattice(n, a1_max) for n in (3, 4)}
        for check in dimension_checks(lattices, fixtures.statements):
            _parity_diff(section, check)

    for name, run in (("parametric", parametric), ("parametric-k", per_k), ("ca", ca),
                      ("collapsed", collapsed), ("telescoping", telescoping),
                      ("collapse-of-fixtures", collapse_of_fixtures),
                      ("congruences", congruences), ("isolated-points", isolated_points),
                      ("parity-n3-n4", classical)):
        _guarded(report, name, run)
