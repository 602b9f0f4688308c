"""Formula DSL: recursive descent parser for relation, J-table and statement files"""
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .algebra import AlgebraElement
from .errors import FormulaSyntaxError, TypeGrammarError
from .types import (
    CAUSTIC, FAMILY_RANK, MIXED, MONOMIAL_CLASSES, SIGNED, Generator, Monomial,
    MultisingularityType, ShiftedType, SymbolTable, resolve_symbol, scan_exponent, scan_symbol,
)

logger = logging.getLogger(__name__)

HYPOTHESES = ("H0", "H1", "H2")
EXPECTATIONS = ("IMPLIED", "NOT_IMPLIED")

TABLES = {t.name: t for t in (SIGNED, CAUSTIC, MIXED)}


class _Failure(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(message)
        self.message = message
        self.pos = pos


@dataclass
class Directives:
    """ファイル内で持続するディレクティブ"""
    dim: Optional[int] = None
    requires: str = "H0"
    requires_at_zero: Optional[str] = None
    family: bool = False
    modulus: Optional[int] = None
    source: str = ""
    symbols: str = SIGNED.name
    expect: str = "IMPLIED"


@dataclass
class ParsedRow:
    """解析済みの1行（δ行は δ=±1 の2行に展開済み）"""
    kind: str
    lhs: AlgebraElement
    rhs: AlgebraElement
    line: int
    directives: Directives
    delta: Optional[int] = None
    generator: Optional[Generator] = None
    text: str = ""

    @property
    def lhs_key(self) -> Union[Monomial, ShiftedType]:
        """左辺が係数1の単項のときその単項式"""
        items = self.lhs.items()
        if len(items) != 1 or items[0][1] != 1:
            raise FormulaSyntaxError("left-hand side is not a single type", self.line, 1,
                                     self.directives.source)
        return items[0][0]

    @property
    def hypothesis(self) -> str:
        return self.directives.requires

    @property
    def hypothesis_at_zero(self) -> str:
        return self.directives.requires_at_zero or self.directives.requires


class _ExpressionParser:
    """1行分の再帰下降パーサ

    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := [coeff "*"] atom | coeff
    coeff  := int ["/" int] | "[" affine expression in d "]"
    atom   := "(" expr ")" | type
    """

    def __init__(self, text: str, table: SymbolTable, delta: int = 1,
                 symbolic: bool = False, allow_delta: bool = True):
        self.text = text
        self.pos = 0
        self.table = table
        self.delta = delta
        self.symbolic = symbolic
        self.allow_delta = allow_delta
        self.uses_delta = False
        self.monomial_cls = MONOMIAL_CLASSES.get(table.name, MultisingularityType)

    # ==================== 字句 ====================

    def fail(self, message: str, pos: Optional[int] = None):
        raise _Failure(message, self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = repr(self.peek()) if self.peek() else "end of line"
            self.fail(f"expected {ch!r}, found {found}")
        self.pos += 1

    def at_end(self) -> bool:
        return self.peek() == ""

    def at_symbol(self) -> bool:
        return (self.pos + 1 < len(self.text) and self.text[self.pos] in FAMILY_RANK
                and self.text[self.pos + 1].isdigit())

    def read_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected an integer")
        return int(self.text[start:self.pos])

    # ==================== 式 ====================

    def parse_expression(self) -> AlgebraElement:
        sign = 1
        if not self.peek():
            self.fail("expected a term, found end of line")
        if self.peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        total = self.parse_term().scale(sign)
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            term = self.parse_term()
            total = total + term if op == "+" else total - term
        return total

    def parse_term(self) -> AlgebraElement:
        ch = self.peek()
        if ch == "[":
            coeff = self.parse_bracket()
            self.expect("*")
            return self.parse_atom().scale(coeff)
        if ch.isdigit():
            start = self.pos
            coeff = Fraction(self.read_int())
            if self.peek() == "/":
                self.pos += 1
                denominator = self.read_int()
                if denominator == 0:
                    self.fail("zero denominator", start)
                coeff /= denominator
            if self.peek() == "*":
                self.pos += 1
                return self.parse_atom().scale(coeff)
            # 裸の数は単位元の倍数（"1" が単位元、"0" が空和）
            return AlgebraElement.monomial(self.unit_key(), coeff)
        return self.parse_atom()

    def parse_atom(self) -> AlgebraElement:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.parse_expression()
            self.expect(")")
            return inner
        if ch == "1":
            self.pos += 1
            return AlgebraElement.monomial(self.unit_key())
        if not self.at_symbol():
            found = repr(ch) if ch else "end of line"
            self.fail(f"expected a type, found {found}")
        return AlgebraElement.monomial(self.parse_type())

    def unit_key(self):
        unit = self.monomial_cls.unit()
        return ShiftedType(unit) if self.symbolic else unit

    def parse_type(self) -> Union[Monomial, ShiftedType]:
        factors: Dict[Generator, int] = {}
        shift: Optional[int] = None
        while True:
            self.skip_ws()
            if not self.at_symbol():
                break
            start = self.pos
            try:
                family, index, sign, self.pos = scan_symbol(self.text, self.pos, self.table,
                                                            self.allow_delta)
                if sign in ("d", "-d"):
                    self.uses_delta = True
                symbol = resolve_symbol(family, index, sign, self.table, self.text, start + 1,
                                        self.delta)
            except TypeGrammarError as e:
                raise _Failure(e.message, start)
            exp = 1
            if self.pos < len(self.text) and self.text[self.pos] == "^":
                self.pos += 1
                if self.text[self.pos:self.pos + 1] == "{":
                    if not (self.symbolic and symbol.is_a1):
                        self.fail("symbolic exponents are only allowed on A1 in @family rows")
                    if shift is not None:
                        self.fail("A1 carries more than one symbolic exponent")
                    shift = self.parse_symbolic_exponent()
                    continue
                try:
                    exp, self.pos = scan_exponent(self.text, self.pos)
                except TypeGrammarError as e:
                    raise _Failure(e.message, self.pos)
            elif self.text[self.pos:self.pos + 1].isalnum() and self.pos < len(self.text):
                self.fail(f"unexpected {self.text[self.pos]!r} after {symbol.token}")
            factors[symbol] = factors.get(symbol, 0) + exp
        monomial = self.monomial_cls.from_factors(factors)
        if self.symbolic:
            if shift is None:
                self.fail("every type in a @family row needs A1^{k-s}")
            if monomial.a1_degree:
                self.fail("A1 mixes a symbolic and a numeric exponent")
            return ShiftedType(monomial, shift)
        return monomial

    def parse_symbolic_exponent(self) -> int:
        self.pos += 1
        self.expect("k")
        shift = 0
        if self.peek() == "-":
            self.pos += 1
            shift = self.read_int()
        elif self.peek() == "+":
            self.fail("A1^{k+s} is not supported")
        self.expect("}")
        return shift

    # ==================== δ 係数 ====================

    def parse_bracket(self) -> Fraction:
        self.pos += 1
        value = self.bracket_sum()
        self.expect("]")
        return value

    def bracket_sum(self) -> Fraction:
        value = self.bracket_product()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.bracket_product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def bracket_product(self) -> Fraction:
        value = self.bracket_factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.bracket_factor()
            if op == "/" and rhs == 0:
                self.fail("division by zero")
            value = value * rhs if op == "*" else value / rhs
        return value

    def bracket_factor(self) -> Fraction:
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return -self.bracket_factor()
        if ch == "(":
            self.pos += 1
            value = self.bracket_sum()
            self.expect(")")
            return value
        if ch == "d":
            self.pos += 1
            self.uses_delta = True
            return Fraction(self.delta)
        return Fraction(self.read_int())


def parse_expression(text: str, table: SymbolTable = SIGNED, delta: int = 1,
                     symbolic: bool = False) -> AlgebraElement:
    """式を1つ解析する（CLIの --statement などで使用）"""
    parser = _ExpressionParser(text, table, delta, symbolic, allow_delta=False)
    try:
        value = parser.parse_expression()
        if not parser.at_end():
            parser.fail(f"unexpected {parser.peek()!r}")
    except _Failure as e:
        raise FormulaSyntaxError(e.message, 1, e.pos + 1, "<statement>")
    return value


# ==================== 文書 ====================

def _logical_lines(text: str) -> List[Tuple[int, str, List[Tuple[int, int, int]]]]:
    """継続行（字下げ行）を結合し、(開始行, 本文, 位置対応表) を返す"""
    result: List[Tuple[int, str, List[Tuple[int, int, int]]]] = []
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        if raw[:1].isspace() and result and not body.lstrip().startswith("@"):
            start, joined, segments = result[-1]
            offset = len(joined) + 1
            stripped = body.lstrip()
            segments.append((offset, number, len(body) - len(stripped)))
            result[-1] = (start, f"{joined} {stripped}", segments)
        else:
            stripped = body.strip()
            result.append((number, stripped, [(0, number, len(body) - len(body.lstrip()))]))
    return result


def _locate(segments: List[Tuple[int, int, int]], pos: int) -> Tuple[int, int]:
    line, column = segments[0][1], pos + segments[0][2] + 1
    for offset, number, indent in segments:
        if pos >= offset:
            line, column = number, pos - offset + indent + 1
    return line, column


def _apply_directive(directives: Directives, body: str, fail) -> Directives:
    name, _, arg = body[1:].partition(" ")
    arg = arg.strip()
    if name == "dim":
        if arg not in ("3", "4", "5"):
            fail(f"@dim expects 3, 4 or 5, got {arg!r}")
        return replace(directives, dim=int(arg))
    if name == "requires":
        parts = arg.split()
        if not parts or parts[0] not in HYPOTHESES:
            fail(f"@requires expects H0, H1 or H2, got {arg!r}")
        at_zero = None
        for extra in parts[1:]:
            key, _, value = extra.partition("=")
            if key != "k0" or value not in HYPOTHESES:
                fail(f"unknown @requires qualifier {extra!r}")
            at_zero = value
        return replace(directives, requires=parts[0], requires_at_zero=at_zero)
    if name == "family":
        if arg not in ("k", "off"):
            fail(f"@family expects k or off, got {arg!r}")
        return replace(directives, family=arg == "k")
    if name == "modulus":
        if not arg.isdigit() or int(arg) < 1:
            fail(f"@modulus expects a positive integer, got {arg!r}")
        return replace(directives, modulus=int(arg))
    if name == "source":
        return replace(directives, source=arg)
    if name == "expect":
        if arg not in EXPECTATIONS:
            fail(f"@expect expects IMPLIED or NOT_IMPLIED, got {arg!r}")
        return replace(directives, expect=arg)
    if name == "symbols":
        if arg not in TABLES:
            fail(f"@symbols expects one of {', '.join(TABLES)}, got {arg!r}")
        return replace(directives, symbols=arg)
    fail(f"unknown directive @{name}")


def _parse_jtable_lhs(body: str, table: SymbolTable, delta: int, fail) -> Tuple[Optional[Generator], bool, int]:
    """'J(<gen>)' を読む。(生成元, δ使用, '=' の位置) を返す（J(1) は生成元 None）"""
    close = body.find(")")
    if close < 0:
        fail("unterminated J(", 0)
    inner = body[2:close].strip()
    eq = body.find("=", close)
    if eq < 0 or body[close + 1:eq].strip():
        fail("expected '=' after J(...)", close + 1)
    if inner == "1":
        return None, False, eq
    try:
        family, index, sign, end = scan_symbol(inner, 0, table, allow_delta=True)
        if end != len(inner):
            fail(f"unexpected {inner[end:]!r} in J(...)", 2 + end)
        return resolve_symbol(family, index, sign, table, inner, 1, delta), sign in ("d", "-d"), eq
    except TypeGrammarError as e:
        fail(e.message, 2)


def parse_document(text: str, source: str = "") -> List[ParsedRow]:
    """DSL文書を解析する"""
    rows: List[ParsedRow] = []
    directives = Directives()
    for start_line, body, segments in _logical_lines(text):

        def fail(message: str, pos: int = 0):
            line, column = _locate(segments, pos)
            raise FormulaSyntaxError(message, line, column, source)

        if body.startswith("@"):
            directives = _apply_directive(directives, body, fail)
            continue
        table = TABLES[directives.symbols]
        for delta in (1, -1):
            row, uses_delta = _parse_row(body, table, delta, directives, start_line, fail)
            if uses_delta:
                row.delta = delta
            rows.append(row)
            if not uses_delta:
                break
    logger.debug(f"parsed {len(rows)} rows from {source or '<text>'}")
    return rows


def _parse_row(body: str, table: SymbolTable, delta: int, directives: Directives,
               line: int, fail) -> Tuple[ParsedRow, bool]:
    generator = None
    uses_delta = False
    if body.startswith("J("):
        generator, uses_delta, eq = _parse_jtable_lhs(body, table, delta, fail)
        kind = "jtable"
        lhs_text, rhs_text, rhs_offset = "", body[eq + 1:], eq + 1
    elif "=" in body:
        eq = body.index("=")
        kind = "relation"
        lhs_text, rhs_text, rhs_offset = body[:eq], body[eq + 1:], eq + 1
    else:
        kind = "statement"
        lhs_text, rhs_text, rhs_offset = "", body, 0

    symbolic = directives.family and kind == "relation"
    lhs = AlgebraElement()
    if lhs_text:
        lhs, lhs_delta = _parse_part(lhs_text, 0, table, delta, symbolic, fail)
        uses_delta = uses_delta or lhs_delta
    rhs, rhs_delta = _parse_part(rhs_text, rhs_offset, table, delta, symbolic, fail)
    uses_delta = uses_delta or rhs_delta
    row = ParsedRow(kind=kind, lhs=lhs, rhs=rhs, line=line, directives=directives,
                    generator=generator, text=body)
    if kind == "jtable" and generator is None and row.rhs != AlgebraElement.one():
        fail("J(1) must equal 1")
    return row, uses_delta


def _parse_part(text: str, offset: int, table: SymbolTable, delta: int, symbolic: bool,
                fail) -> Tuple[AlgebraElement, bool]:
    parser = _ExpressionParser(text, table, delta, symbolic)
    try:
        value = parser.parse_expression()
        if not parser.at_end():
            parser.fail(f"unexpected {parser.peek()!r}")
    except _Failure as e:
        fail(e.message, offset + e.pos)
    return value, parser.uses_delta


def parse_file(path: Union[str, Path]) -> List[ParsedRow]:
    path = Path(path)
    return parse_document(path.read_text(encoding="utf-8"), source=path.name)


def format_relation(lhs, rhs: AlgebraElement) -> str:
    """'lhs = rhs' の1行を出力"""
    return f"{lhs} = {rhs.format()}"
