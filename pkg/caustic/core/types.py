"""Multisingularity types: generators of S+, monomials and their grammar"""
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Dict, Iterator, List, Optional, Tuple, Type, TypeVar

from .errors import TypeGrammarError

MAX_CLASSIFIED_CODIM = 5

FAMILY_RANK = {"A": 0, "D": 1, "E": 2}


class Sign(Enum):
    """生成元の符号"""
    PLUS = "+"
    MINUS = "-"
    NONE = ""


@dataclass(frozen=True)
class Generator:
    """ADE型の記号 (family, μ, sign)"""
    family: str
    index: int
    sign: Sign = Sign.NONE

    @property
    def token(self) -> str:
        return f"{self.family}{self.index}{self.sign.value}"

    @property
    def codim(self) -> int:
        if self.family == "E":
            return 5
        return self.index - 1

    @property
    def is_a1(self) -> bool:
        return self.family == "A" and self.index == 1

    def display_key(self) -> Tuple[int, int, int]:
        sign_rank = {Sign.PLUS: 0, Sign.MINUS: 1, Sign.NONE: 2}[self.sign]
        return (-FAMILY_RANK[self.family], -self.index, sign_rank)

    def __str__(self) -> str:
        return self.token


def _gen(token: str) -> Generator:
    sign = Sign(token[2:]) if len(token) > 2 else Sign.NONE
    return Generator(token[0], int(token[1]), sign)


# 生成元の順序は固定（全出力の決定性のため）
GENERATORS: Tuple[Generator, ...] = tuple(_gen(t) for t in (
    "A1", "A2", "A3+", "A3-", "A4", "A5+", "A5-", "A6",
    "D4+", "D4-", "D5+", "D5-", "D6+", "D6-", "E6+", "E6-",
))

# 焦線の特異点型: A3, A5, D5, E6 の符号は区別しない
CAUSTIC_SYMBOLS: Tuple[Generator, ...] = tuple(_gen(t) for t in (
    "A1", "A2", "A3", "A4", "A5", "A6",
    "D4+", "D4-", "D5", "D6+", "D6-", "E6",
))

COLLAPSIBLE = {("A", 3), ("A", 5), ("D", 5), ("E", 6)}


@dataclass(frozen=True)
class SymbolTable:
    """字句解析で使う記号表"""
    name: str
    symbols: Tuple[Generator, ...]

    def lookup(self, family: str, index: int, sign: Sign) -> Optional[Generator]:
        candidate = Generator(family, index, sign)
        return candidate if candidate in self.symbols else None

    def signable(self, family: str, index: int) -> bool:
        return any(s.family == family and s.index == index and s.sign is not Sign.NONE
                   for s in self.symbols)


SIGNED = SymbolTable("signed", GENERATORS)
CAUSTIC = SymbolTable("caustic", CAUSTIC_SYMBOLS)
MIXED = SymbolTable("mixed", GENERATORS + tuple(
    s for s in CAUSTIC_SYMBOLS if (s.family, s.index) in COLLAPSIBLE))


M = TypeVar("M", bound="Monomial")


@dataclass(frozen=True)
class Monomial:
    """記号表上の可換単項式（指数ベクトルで正規化）"""
    exponents: Tuple[int, ...]
    codim: int = field(init=False, compare=False, repr=False)
    a1_degree: int = field(init=False, compare=False, repr=False)

    SYMBOLS: ClassVar[Tuple[Generator, ...]] = ()
    TABLE: ClassVar[SymbolTable]

    def __post_init__(self):
        if len(self.exponents) != len(self.SYMBOLS):
            raise ValueError(f"expected {len(self.SYMBOLS)} exponents, got {len(self.exponents)}")
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be non-negative")
        object.__setattr__(self, "codim",
                           sum(e * s.codim for e, s in zip(self.exponents, self.SYMBOLS)))
        object.__setattr__(self, "a1_degree", self.exponents[0])

    @classmethod
    def unit(cls: Type[M]) -> M:
        return cls((0,) * len(cls.SYMBOLS))

    @classmethod
    def from_factors(cls: Type[M], factors: Dict[Generator, int]) -> M:
        exps = [0] * len(cls.SYMBOLS)
        for symbol, exp in factors.items():
            try:
                exps[cls.SYMBOLS.index(symbol)] += exp
            except ValueError:
                raise TypeGrammarError(f"symbol {symbol.token} is not allowed here", symbol.token)
        return cls(tuple(exps))

    @classmethod
    def of(cls: Type[M], symbol: Generator, exp: int = 1) -> M:
        return cls.from_factors({symbol: exp})

    def __mul__(self: M, other: M) -> M:
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __pow__(self: M, exp: int) -> M:
        return type(self)(tuple(e * exp for e in self.exponents))

    def is_unit(self) -> bool:
        return not any(self.exponents)

    def exponent(self, symbol: Generator) -> int:
        return self.exponents[self.SYMBOLS.index(symbol)]

    def without_a1(self: M) -> M:
        return type(self)((0,) + self.exponents[1:])

    def with_a1(self: M, k: int) -> M:
        return type(self)((k,) + self.exponents[1:])

    def factors(self) -> List[Tuple[Generator, int]]:
        """表示順（A1以外を降順、A1を末尾）の因子リスト"""
        pairs = [(s, e) for s, e in zip(self.SYMBOLS, self.exponents) if e and not s.is_a1]
        pairs.sort(key=lambda p: p[0].display_key())
        if self.a1_degree:
            pairs.append((self.SYMBOLS[0], self.a1_degree))
        return pairs

    def sort_key(self) -> Tuple:
        return (self.codim, self.a1_degree, self.exponents)

    def __lt__(self, other: "Monomial") -> bool:
        return self.sort_key() < other.sort_key()

    def format(self) -> str:
        return format_type(self)

    def __str__(self) -> str:
        return format_type(self)


class MultisingularityType(Monomial):
    """S+ の元（多重特異点の型）"""
    SYMBOLS = GENERATORS
    TABLE = SIGNED

    def __repr__(self) -> str:
        return f"MultisingularityType({format_type(self)!r})"


class CausticType(Monomial):
    """符号を潰した焦線特異点の型"""
    SYMBOLS = CAUSTIC_SYMBOLS
    TABLE = CAUSTIC

    def __repr__(self) -> str:
        return f"CausticType({format_type(self)!r})"


class MixedType(Monomial):
    """符号つきと符号なしの記号が混在する型（パリティ命題用）"""
    SYMBOLS = MIXED.symbols
    TABLE = MIXED

    def __repr__(self) -> str:
        return f"MixedType({format_type(self)!r})"

    def expand(self) -> List[MultisingularityType]:
        """符号なしの因子を符号つきの原像に展開する"""
        signed: Dict[Generator, int] = {}
        unsigned: Dict[Generator, int] = {}
        for symbol, exp in zip(self.SYMBOLS, self.exponents):
            if exp:
                target = unsigned if symbol in CAUSTIC_SYMBOLS and symbol not in GENERATORS else signed
                target[symbol] = exp
        fixed = MultisingularityType.from_factors(signed)
        return sorted((fixed * p for p in preimages(CausticType.from_factors(unsigned))),
                      key=lambda m: m.sort_key())


MONOMIAL_CLASSES = {SIGNED.name: MultisingularityType, CAUSTIC.name: CausticType,
                    MIXED.name: MixedType}

UNIT = MultisingularityType.unit()
A1 = MultisingularityType.of(GENERATORS[0])


def generator(token: str) -> Generator:
    """トークンから生成元を取得"""
    for g in GENERATORS:
        if g.token == token:
            return g
    raise TypeGrammarError(f"unknown generator token {token!r}", token)


def codim(m: Monomial) -> int:
    return m.codim


# ==================== 文法 ====================

def scan_symbol(text: str, pos: int, table: SymbolTable,
                allow_delta: bool = False) -> Tuple[str, int, str, int]:
    """位置posから記号を1つ読む。(family, index, sign, 次の位置) を返す

    sign は "+", "-", "", もしくは δ 行用の "d", "-d"。
    符号は記号に隣接し、かつ記号表でその族が符号を持つときだけ結合する。
    """
    if pos + 1 >= len(text) or text[pos] not in FAMILY_RANK or not text[pos + 1].isdigit():
        raise TypeGrammarError(f"expected a generator at column {pos + 1}", text, pos + 1)
    family, index = text[pos], int(text[pos + 1])
    end = pos + 2
    if end < len(text) and text[end].isdigit():
        raise TypeGrammarError(f"unknown generator {text[pos:end + 1]!r}", text, pos + 1)
    sign = ""
    nxt = text[end] if end < len(text) else ""
    if allow_delta and nxt == "d":
        sign, end = "d", end + 1
    elif allow_delta and nxt == "-" and text[end + 1:end + 2] == "d":
        sign, end = "-d", end + 2
    elif nxt in ("+", "-") and table.signable(family, index):
        sign, end = nxt, end + 1
    return family, index, sign, end


def resolve_symbol(family: str, index: int, sign: str, table: SymbolTable,
                   text: str = "", column: int = 0, delta: int = 1) -> Generator:
    if sign == "d":
        sign = "+" if delta > 0 else "-"
    elif sign == "-d":
        sign = "-" if delta > 0 else "+"
    symbol = table.lookup(family, index, Sign(sign))
    if symbol is None:
        token = f"{family}{index}{sign}"
        if table.signable(family, index) and not sign:
            raise TypeGrammarError(f"generator {token} requires a sign", text, column)
        raise TypeGrammarError(f"unknown generator token {token!r}", text, column)
    return symbol


def scan_exponent(text: str, pos: int) -> Tuple[int, int]:
    """'^' の後の正整数を読む"""
    end = pos
    while end < len(text) and text[end].isdigit():
        end += 1
    if end == pos:
        if text[pos:pos + 1] == "-":
            raise TypeGrammarError("negative exponents are not allowed", text, pos + 1)
        raise TypeGrammarError(f"malformed exponent at column {pos + 1}", text, pos + 1)
    value = int(text[pos:end])
    if value <= 0:
        raise TypeGrammarError("exponent must be a positive integer", text, pos + 1)
    return value, end


def parse_type(text: str, table: SymbolTable = SIGNED) -> Monomial:
    """型の文字列を解析する（例: "D4+ A3- A1^3"、"1"）"""
    cls = MONOMIAL_CLASSES[table.name]
    stripped = text.strip()
    if not stripped:
        raise TypeGrammarError("empty type", text)
    if stripped == "1":
        return cls.unit()
    factors: Dict[Generator, int] = {}
    pos = 0
    while pos < len(stripped):
        if stripped[pos].isspace():
            pos += 1
            continue
        start = pos
        family, index, sign, pos = scan_symbol(stripped, pos, table)
        symbol = resolve_symbol(family, index, sign, table, stripped, start + 1)
        exp = 1
        if pos < len(stripped) and stripped[pos] == "^":
            exp, pos = scan_exponent(stripped, pos + 1)
        if pos < len(stripped) and not stripped[pos].isspace():
            raise TypeGrammarError(f"unexpected {stripped[pos]!r} at column {pos + 1}",
                                   stripped, pos + 1)
        factors[symbol] = factors.get(symbol, 0) + exp
    return cls.from_factors(factors)


def format_type(m: Monomial) -> str:
    factors = m.factors()
    if not factors:
        return "1"
    return " ".join(s.token if e == 1 else f"{s.token}^{e}" for s, e in factors)


# ==================== 列挙 ====================

def _a1_free_exponents(symbols: Tuple[Generator, ...], max_codim: int) -> Iterator[Tuple[int, ...]]:
    def rec(i: int, budget: int) -> Iterator[Tuple[int, ...]]:
        if i == len(symbols):
            yield ()
            return
        step = symbols[i].codim
        top = budget // step if step else 0
        for e in range(top + 1):
            for rest in rec(i + 1, budget - e * step):
                yield (e,) + rest
    for tail in rec(1, max_codim):
        yield (0,) + tail


def enumerate_types(max_codim: int, max_a1: int,
                    cls: Type[M] = MultisingularityType) -> List[M]:
    """codim ≤ max_codim, A1次数 ≤ max_a1 の全ての型を決定的な順序で列挙"""
    if not 0 <= max_codim <= MAX_CLASSIFIED_CODIM:
        raise ValueError(f"max_codim must be in 0..{MAX_CLASSIFIED_CODIM}")
    if max_a1 < 0:
        raise ValueError("max_a1 must be non-negative")
    result = [cls(exps).with_a1(k)
              for exps in _a1_free_exponents(cls.SYMBOLS, max_codim)
              for k in range(max_a1 + 1)]
    return sorted(result, key=lambda m: m.sort_key())


# ==================== 符号の縮約 ====================

def collapse_type(m: MultisingularityType) -> CausticType:
    """A3±, A5±, D5±, E6± の符号を落とした焦線型"""
    factors: Dict[Generator, int] = {}
    for symbol, exp in zip(GENERATORS, m.exponents):
        if not exp:
            continue
        if (symbol.family, symbol.index) in COLLAPSIBLE:
            symbol = Generator(symbol.family, symbol.index)
        factors[symbol] = factors.get(symbol, 0) + exp
    return CausticType.from_factors(factors)


def preimages(c: CausticType) -> List[MultisingularityType]:
    """焦線型に縮約される全ての符号つき型"""
    choices = []
    for symbol, exp in zip(CAUSTIC_SYMBOLS, c.exponents):
        if not exp:
            continue
        if (symbol.family, symbol.index) in COLLAPSIBLE:
            plus = Generator(symbol.family, symbol.index, Sign.PLUS)
            minus = Generator(symbol.family, symbol.index, Sign.MINUS)
            choices.append([{plus: p, minus: exp - p} for p in range(exp + 1)])
        else:
            choices.append([{symbol: exp}])
    result = []
    for combo in itertools.product(*choices):
        factors: Dict[Generator, int] = {}
        for part in combo:
            for symbol, exp in part.items():
                if exp:
                    factors[symbol] = exp
        result.append(MultisingularityType.from_factors(factors))
    return sorted(result, key=lambda m: m.sort_key())


@dataclass(frozen=True)
class ShiftedType:
    """記号的なA1指数をもつ型 base·A1^{k-shift}"""
    base: Monomial
    shift: int = 0

    def __post_init__(self):
        if self.base.a1_degree:
            raise TypeGrammarError(f"base {self.base} of a shifted type must not contain A1",
                                   str(self.base))

    @property
    def codim(self) -> int:
        return self.base.codim

    @property
    def a1_degree(self) -> int:
        return 0

    def instantiate(self, k: int) -> Optional[Monomial]:
        """k-shift < 0 なら None（その項は0とみなす）"""
        exp = k - self.shift
        if exp < 0:
            return None
        return self.base.with_a1(exp)

    def sort_key(self) -> Tuple:
        return (self.base.sort_key(), self.shift)

    def __str__(self) -> str:
        a1 = "A1^{k}" if self.shift == 0 else f"A1^{{k-{self.shift}}}"
        if self.base.is_unit():
            return a1
        return f"{format_type(self.base)} {a1}"
