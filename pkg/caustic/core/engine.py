"""Relation engine facade: cached derivations per (dimension, A1 cutoff)"""
import logging
import threading
from typing import Dict, List, Optional, Tuple

from .adjacency import JTable
from .formulas import CaFormula, ParametricFormula, aggregate_ca, collapse_signs, lift_all
from .parity import Congruence, RelationLattice, raw_congruences
from .relations import (
    Hypothesis, RelationSystem, SolvedFormula, build_system, residual_check, solve,
)

logger = logging.getLogger(__name__)

DEFAULT_A1_MAX = 12


class RelationEngine:
    """J表から関係式・ca式・格子までを導出するエンジン"""

    def __init__(self, jtable: Optional[JTable] = None, a1_max: int = DEFAULT_A1_MAX):
        """エンジンの初期化"""
        self.jtable = jtable or JTable.load()
        self.a1_max = a1_max
        self._cache: Dict[Tuple[str, int, int], object] = {}
        self._lock = threading.RLock()

    def _cached(self, kind: str, dim: int, a1_max: Optional[int], compute):
        key = (kind, dim, self.a1_max if a1_max is None else a1_max)
        with self._lock:
            if key not in self._cache:
                logger.debug(f"computing {kind} for n={dim} K={key[2]}")
                self._cache[key] = compute(key[2])
            return self._cache[key]

    def system(self, dim: int, a1_max: Optional[int] = None) -> RelationSystem:
        return self._cached("system", dim, a1_max,
                            lambda k: build_system(self.jtable, dim, k))

    def solved(self, dim: int, a1_max: Optional[int] = None) -> List[SolvedFormula]:
        return self._cached("solved", dim, a1_max,
                            lambda k: solve(self.system(dim, k)))

    def residual(self, dim: int, a1_max: Optional[int] = None):
        return residual_check(self.solved(dim, a1_max), self.system(dim, a1_max))

    def parametric(self, dim: int, a1_max: Optional[int] = None) -> List[ParametricFormula]:
        return self._cached("parametric", dim, a1_max,
                            lambda k: lift_all(self.solved(dim, k)))

    def ca(self, dim: int, a1_max: Optional[int] = None) -> List[CaFormula]:
        return self._cached("ca", dim, a1_max,
                            lambda k: [aggregate_ca(p) for p in self.parametric(dim, k)])

    def collapsed(self, a1_max: Optional[int] = None) -> List[CaFormula]:
        return self._cached("collapsed", 5, a1_max,
                            lambda k: collapse_signs(self.ca(5, k)))

    def lattice(self, dim: int, a1_max: Optional[int] = None) -> RelationLattice:
        return self._cached("lattice", dim, a1_max,
                            lambda k: RelationLattice.from_ca_formulas(self.ca(dim, k), dim))

    def congruences(self, dim: int, hypothesis: Hypothesis = Hypothesis.H0,
                    a1_max: Optional[int] = None) -> List[Congruence]:
        return raw_congruences(self.ca(dim, a1_max), hypothesis)
