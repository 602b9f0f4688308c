"""Core components: types, algebra, J table, relation engine and parity checks"""
from .adjacency import JTable, ValidationReport, validate_jtable
from .algebra import AlgebraElement, TruncationBounds, add, geometric_partial_sum, mul
from .engine import DEFAULT_A1_MAX, RelationEngine
from .errors import CausticError, ErrorCode, ErrorType
from .fixtures import FixtureSet, compare, load_fixtures, verify_all
from .formulas import CaFormula, ParametricFormula, aggregate_ca, collapse_signs, lift_parametric
from .parity import (
    Congruence, RelationLattice, divisibility_oracle, gf2_implies, raw_congruences,
    report_isolated_point_parities,
)
from .relations import (
    Equation, Hypothesis, SolvedFormula, build_system, residual_check, solve,
)
from .types import CausticType, Generator, MultisingularityType, codim, enumerate_types, parse_type

__all__ = [
    'JTable', 'ValidationReport', 'validate_jtable',
    'AlgebraElement', 'TruncationBounds', 'add', 'geometric_partial_sum', 'mul',
    'DEFAULT_A1_MAX', 'RelationEngine',
    'CausticError', 'ErrorCode', 'ErrorType',
    'FixtureSet', 'compare', 'load_fixtures', 'verify_all',
    'CaFormula', 'ParametricFormula', 'aggregate_ca', 'collapse_signs', 'lift_parametric',
    'Congruence', 'RelationLattice', 'divisibility_oracle', 'gf2_implies', 'raw_congruences',
    'report_isolated_point_parities',
    'Equation', 'Hypothesis', 'SolvedFormula', 'build_system', 'residual_check', 'solve',
    'CausticType', 'Generator', 'MultisingularityType', 'codim', 'enumerate_types', 'parse_type',
]
