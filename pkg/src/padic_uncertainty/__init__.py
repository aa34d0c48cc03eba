"""Exact p-adic Hilbert spaces and verification of p-adic uncertainty inequalities."""

from .exact_field import (
    NEG_INF,
    Exponent,
    Prime,
    Rational,
    abs_exp,
    exp_add,
    exp_half,
    exp_le,
    exp_max,
    exp_sub,
    valuation,
)
from .operators import (
    DenseOperator,
    DiagonalOperator,
    EntryRule,
    adjoint,
    anticommutator,
    apply,
    commutator,
    is_selfadjoint,
)
from .space import C0, PVector, inner, norm, orthogonal_witness, sample_normalized
from .uncertainty import (
    CheckId,
    HypothesisError,
    Verdict,
    check_hrs_i,
    check_hrs_ii,
    check_hrs_ii_product,
    check_hrs_iii,
    check_hrs_iv,
    check_hrs_v,
    check_hrs_vi,
    check_identity_ii,
    check_mp,
    check_notes,
    delta,
)

__version__ = "0.1.0"

__all__ = [
    "C0",
    "CheckId",
    "DenseOperator",
    "DiagonalOperator",
    "EntryRule",
    "Exponent",
    "HypothesisError",
    "NEG_INF",
    "PVector",
    "Prime",
    "Rational",
    "Verdict",
    "abs_exp",
    "adjoint",
    "anticommutator",
    "apply",
    "check_hrs_i",
    "check_hrs_ii",
    "check_hrs_ii_product",
    "check_hrs_iii",
    "check_hrs_iv",
    "check_hrs_v",
    "check_hrs_vi",
    "check_identity_ii",
    "check_mp",
    "check_notes",
    "commutator",
    "delta",
    "exp_add",
    "exp_half",
    "exp_le",
    "exp_max",
    "exp_sub",
    "inner",
    "is_selfadjoint",
    "norm",
    "orthogonal_witness",
    "sample_normalized",
    "valuation",
]
