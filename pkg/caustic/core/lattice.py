"""Exact linear algebra for parity questions: GF(2) spans and integer lattice membership"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import ZZ, Matrix, Rational
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

logger = logging.getLogger(__name__)


# ==================== GF(2) ====================

def bits_of(indices) -> int:
    value = 0
    for i in indices:
        value ^= 1 << i
    return value


def indices_of(value: int) -> List[int]:
    result = []
    i = 0
    while value:
        if value & 1:
            result.append(i)
        value >>= 1
        i += 1
    return result


def lowest_bit(value: int) -> int:
    return (value & -value).bit_length() - 1


class GF2Span:
    """ビット集合で表した GF(2) ベクトルの張る空間

    枢軸は最下位ビット（変数順で最初の変数）。各行は入力行の組み合わせ（witness）を保持する。
    """

    def __init__(self):
        self._rows: Dict[int, Tuple[int, int]] = {}
        self._inputs = 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, vector: int) -> Tuple[int, int]:
        """(余り, 使った入力行のビット集合)"""
        witness = 0
        remainder = 0
        while vector:
            pivot = lowest_bit(vector)
            row = self._rows.get(pivot)
            if row is None:
                remainder |= 1 << pivot
                vector ^= 1 << pivot
            else:
                vector ^= row[0]
                witness ^= row[1]
        return remainder, witness

    def insert(self, vector: int) -> bool:
        """行を追加する。独立なら True"""
        label = 1 << self._inputs
        self._inputs += 1
        remainder, witness = self.reduce(vector)
        if not remainder:
            return False
        pivot = lowest_bit(remainder)
        self._rows[pivot] = (remainder, witness ^ label)
        return True

    def contains(self, vector: int) -> Tuple[bool, int]:
        remainder, witness = self.reduce(vector)
        return remainder == 0, witness

    def reduced_basis(self) -> List[Tuple[int, int]]:
        """簡約行階段形 (vector, witness) を枢軸順で返す"""
        rows = dict(self._rows)
        for pivot in sorted(rows):
            vec, wit = rows[pivot]
            for other in sorted(rows):
                if other != pivot and (rows[other][0] >> pivot) & 1:
                    rows[other] = (rows[other][0] ^ vec, rows[other][1] ^ wit)
        return [rows[p] for p in sorted(rows)]


# ==================== 整数格子 ====================

def to_fraction(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def integer_kernel_basis(rows: Sequence[Sequence[Fraction]], size: int) -> List[List[int]]:
    """有理行列の核の基底（各ベクトルを整数にスケール）"""
    if not rows:
        return [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    matrix = Matrix([[Rational(c.numerator, c.denominator) for c in row] for row in rows])
    basis = []
    for vector in matrix.nullspace():
        entries = [to_fraction(x) for x in vector]
        scale = lcm(*(e.denominator for e in entries))
        basis.append([int(e * scale) for e in entries])
    return basis


def smith_form(matrix: List[List[int]], width: int):
    """整数行列 B の Smith 分解 S = P·B·Q を (対角成分, P, Q) の整数リストで返す"""
    domain_matrix = DomainMatrix([[ZZ(x) for x in row] for row in matrix], (len(matrix), width), ZZ)
    smf, p, q = smith_normal_decomp(domain_matrix)
    smf = smf.to_list()
    diagonal = [int(smf[i][i]) if i < width else 0 for i in range(len(matrix))]
    return (diagonal, [[int(x) for x in row] for row in p.to_list()],
            [[int(x) for x in row] for row in q.to_list()])


@dataclass
class LatticeWitness:
    """ℓ = Σ λ_i·row_i + d·z の証拠"""
    combination: List[Fraction]
    quotient: List[int]
    remainder: List[Fraction]


class IntegerLattice:
    """関係式の有理行空間 W と、ℓ ∈ W + dℤ^N の判定"""

    def __init__(self, rows: Sequence[Sequence[Fraction]], size: int):
        self.rows = [list(map(Fraction, row)) for row in rows]
        self.size = size
        self._kernel: Optional[List[List[int]]] = None
        self._smith = None

    @property
    def kernel(self) -> List[List[int]]:
        if self._kernel is None:
            self._kernel = integer_kernel_basis(self.rows, self.size)
            logger.debug(f"kernel of {len(self.rows)} relations has dimension {len(self._kernel)}")
        return self._kernel

    @property
    def smith(self):
        if self._smith is None:
            self._smith = smith_form(self.kernel, self.size)
        return self._smith

    def membership(self, ell: Sequence[Fraction], d: int) -> Optional[LatticeWitness]:
        """ℓ - r ∈ dℤ^N となる r ∈ W があれば証拠を返す（なければ None）"""
        ell = [Fraction(x) for x in ell]
        target = []
        for row in self.kernel:
            value = sum((c * e for c, e in zip(row, ell)), Fraction(0)) / d
            if value.denominator != 1:
                return None
            target.append(int(value))

        z = self.solve_kernel(target)
        if z is None:
            return None
        remainder = [e - d * zi for e, zi in zip(ell, z)]
        return LatticeWitness(self.express(remainder), z, remainder)

    def solve_kernel(self, target: Sequence[int]) -> Optional[List[int]]:
        """B·z = target の整数解 z（B は核の基底、解がなければ None）"""
        if not self.kernel:
            return [0] * self.size
        diagonal, p, q = self.smith
        # S·y = P·target, z = Q·y
        y = [0] * self.size
        for i, s in enumerate(diagonal):
            value = sum(p[i][j] * target[j] for j in range(len(target)))
            if s == 0:
                if value:
                    return None
                continue
            quotient, rest = divmod(value, s)
            if rest:
                return None
            y[i] = quotient
        return [sum(q[r][c] * y[c] for c in range(self.size)) for r in range(self.size)]

    def express(self, vector: Sequence[Fraction]) -> List[Fraction]:
        """vector = Σ λ_i row_i を満たす λ（自由パラメータは0）"""
        if not self.rows:
            if any(vector):
                raise ValueError("vector is not in the row space")
            return []
        transposed = Matrix([[Rational(r[j].numerator, r[j].denominator) for r in self.rows]
                             for j in range(self.size)])
        rhs = Matrix([Rational(v.numerator, v.denominator) for v in vector])
        solution, params = transposed.gauss_jordan_solve(rhs)
        if params.shape[0]:
            solution = solution.subs({p: 0 for p in params})
        return [to_fraction(x) for x in solution]


def verify_witness(rows: Sequence[Sequence[Fraction]], ell: Sequence[Fraction], d: int,
                   witness: LatticeWitness) -> bool:
    """ℓ - Σ λ_i row_i が成分ごとに d で割り切れることを確かめる"""
    size = len(ell)
    combination = [sum((lam * row[j] for lam, row in zip(witness.combination, rows)), Fraction(0))
                   for j in range(size)]
    if combination != list(witness.remainder):
        return False
    return all(((e - r) / d).denominator == 1 for e, r in zip(ell, combination))
