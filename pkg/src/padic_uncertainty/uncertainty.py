"""The uncertainty functional and exact checkers for the p-adic
Heisenberg-Robertson-Schrodinger and Maccone-Pati inequalities.

Every inequality is decided in exponent space: both sides are magnitudes
``p**e`` with ``e`` in ½Z, square roots halve the exponent and the
``1/sqrt|2|`` factor subtracts ``half(|2|_p)``.  A checker raises
:class:`HypothesisError` when its inputs violate the hypotheses of the bound, so a
verdict with ``holds=False`` always means a genuine violation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .exact_field import (
    Exponent,
    Rational,
    abs_exp,
    exp_add,
    exp_half,
    exp_max,
    exp_sub,
)
from .operators import POperator, adjoint, anticommutator, apply, commutator, is_selfadjoint
from .space import PVector, inner, norm


class HypothesisError(ValueError):
    """Inputs do not satisfy the hypotheses of the checked statement."""


class CheckId(str, enum.Enum):
    HRS_i = "HRS_i"
    HRS_ii = "HRS_ii"
    HRS_ii_product = "HRS_ii_product"
    HRS_iii = "HRS_iii"
    HRS_iv = "HRS_iv"
    HRS_v = "HRS_v"
    HRS_vi = "HRS_vi"
    MP_plus = "MP_plus"
    MP_minus = "MP_minus"
    IDENT_ii = "IDENT_ii"
    NOTE_comm_zero = "NOTE_comm_zero"
    NOTE_anticomm_double = "NOTE_anticomm_double"

    def __str__(self) -> str:
        return self.value


INEQUALITIES = (
    CheckId.HRS_i, CheckId.HRS_ii, CheckId.HRS_ii_product, CheckId.HRS_iii, CheckId.HRS_iv,
    CheckId.HRS_v, CheckId.HRS_vi, CheckId.MP_plus, CheckId.MP_minus,
)
IDENTITIES = (CheckId.IDENT_ii, CheckId.NOTE_comm_zero, CheckId.NOTE_anticomm_double)
NEEDS_SELFADJOINT = frozenset({
    CheckId.HRS_ii, CheckId.HRS_ii_product, CheckId.NOTE_comm_zero, CheckId.NOTE_anticomm_double,
})


@dataclass(frozen=True)
class Verdict:
    """One checked instance.

    For inequalities ``holds`` means ``rhs <= lhs`` and ``degenerate`` means
    the bound is vacuous (``rhs`` is zero).  For identities ``lhs``/``rhs``
    are the magnitudes of the two sides, ``holds`` is exact rational
    equality and ``degenerate`` means both sides vanish.
    """

    check: CheckId
    lhs: Exponent
    rhs: Exponent
    holds: bool
    tight: bool
    degenerate: bool
    seed: str = ""

    def to_json(self) -> dict:
        return {
            "check": self.check.value,
            "holds": self.holds,
            "tight": self.tight,
            "degenerate": self.degenerate,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Verdict":
        return cls(
            CheckId(obj["check"]),
            Exponent.from_json(obj["lhs"]),
            Exponent.from_json(obj["rhs"]),
            bool(obj["holds"]),
            bool(obj["tight"]),
            bool(obj["degenerate"]),
            obj.get("seed", ""),
        )


def _inequality(check: CheckId, lhs: Exponent, rhs: Exponent, seed: str, mutate: bool) -> Verdict:
    # mutate flips the comparison; used only to prove the harness sees violations
    holds = lhs <= rhs if mutate else rhs <= lhs
    return Verdict(check, lhs, rhs, holds, lhs == rhs, rhs.is_zero, seed)


def _identity(check: CheckId, left: Rational, right: Rational, p: int, seed: str,
              mutate: bool) -> Verdict:
    equal = left == right
    lhs, rhs = abs_exp(left, p), abs_exp(right, p)
    holds = (not equal) if mutate else equal
    return Verdict(check, lhs, rhs, holds, lhs == rhs, left == 0 and right == 0, seed)


def require_normalized(x: PVector) -> None:
    if inner(x, x) != 1:
        raise HypothesisError("hypothesis violated: <x,x> != 1")


def _require_domain(A: POperator, x: PVector, name: str) -> None:
    if not A.domain.contains(x):
        raise HypothesisError(f"hypothesis violated: x not in the domain of {name}")
    if A.p != x.p:
        raise HypothesisError(f"hypothesis violated: {name} and x use different primes")


def _require_pair(A: POperator, B: POperator, x: PVector) -> None:
    _require_domain(A, x, "A")
    _require_domain(B, x, "B")
    require_normalized(x)


def _require_selfadjoint(A: POperator, B: POperator, check: CheckId) -> None:
    for name, T in (("A", A), ("B", B)):
        if not is_selfadjoint(T):
            raise HypothesisError(f"precondition violated: {check} needs {name} self-adjoint")


def expectation(A: POperator, x: PVector) -> Rational:
    """``<Ax, x>``."""
    return inner(apply(A, x), x)


def residual(A: POperator, x: PVector) -> PVector:
    """``Ax - <Ax, x> x``."""
    Ax = apply(A, x)
    return Ax - inner(Ax, x) * x


def delta(A: POperator, x: PVector) -> Exponent:
    """Uncertainty ``||Ax - <Ax,x> x||`` of A at a normalized x."""
    _require_domain(A, x, "A")
    require_normalized(x)
    return norm(residual(A, x))


def _spread(A: POperator, B: POperator, x: PVector) -> Exponent:
    return exp_max(delta(A, x), delta(B, x))


def check_hrs_i(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                mutate: bool = False) -> Verdict:
    """``D(A) D(B) >= |<Ax,Bx> - <Ax,x><Bx,x>|``."""
    _require_pair(A, B, x)
    Ax, Bx = apply(A, x), apply(B, x)
    gap = inner(Ax, Bx) - inner(Ax, x) * inner(Bx, x)
    lhs = exp_add(delta(A, x), delta(B, x))
    return _inequality(CheckId.HRS_i, lhs, abs_exp(gap, x.p), seed, mutate)


def hrs_ii_quantity(A: POperator, B: POperator, x: PVector) -> Rational:
    """``<[A,B]x,x>^2 + (<{A,B}x,x> - 2<Ax,x><Bx,x>)^2``."""
    a, b = expectation(A, x), expectation(B, x)
    comm = expectation(commutator(A, B), x)
    anti = expectation(anticommutator(A, B), x)
    return comm * comm + (anti - 2 * a * b) ** 2


def check_hrs_ii(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                 mutate: bool = False) -> Verdict:
    """``max(D(A), D(B)) >= sqrt|Q| / sqrt|2|`` for self-adjoint A, B."""
    _require_selfadjoint(A, B, CheckId.HRS_ii)
    _require_pair(A, B, x)
    q = hrs_ii_quantity(A, B, x)
    rhs = exp_sub(exp_half(abs_exp(q, x.p)), exp_half(abs_exp(2, x.p)))
    return _inequality(CheckId.HRS_ii, _spread(A, B, x), rhs, seed, mutate)


def check_hrs_ii_product(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                         mutate: bool = False) -> Verdict:
    """``D(A) D(B) >= sqrt|Q| / sqrt|2|`` for self-adjoint A, B.

    Same right-hand side as :func:`check_hrs_ii` against the product of the
    uncertainties.  The max form fails once the uncertainties exceed 1; this
    one follows from ``Q = 4(<Ax,Bx> - <Ax,x><Bx,x>)^2`` and part (i).
    """
    _require_selfadjoint(A, B, CheckId.HRS_ii_product)
    _require_pair(A, B, x)
    q = hrs_ii_quantity(A, B, x)
    rhs = exp_sub(exp_half(abs_exp(q, x.p)), exp_half(abs_exp(2, x.p)))
    lhs = exp_add(delta(A, x), delta(B, x))
    return _inequality(CheckId.HRS_ii_product, lhs, rhs, seed, mutate)


def identity_ii_sides(A: POperator, B: POperator, x: PVector) -> tuple[Rational, Rational]:
    """Both sides of the expansion behind the (ii) bound.

    Left: ``<[A,B]x,x>^2 + (<{A,B}x,x> - 2ab)^2``.
    Right: ``2(<ABx,x> - ab)^2 + 2(<BAx,x> - ab)^2`` with ``a = <Ax,x>``, ``b = <Bx,x>``.
    """
    a, b = expectation(A, x), expectation(B, x)
    ab_x = expectation(A.compose(B), x)
    ba_x = expectation(B.compose(A), x)
    right = 2 * (ab_x - a * b) ** 2 + 2 * (ba_x - a * b) ** 2
    return hrs_ii_quantity(A, B, x), right


def check_identity_ii(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                      mutate: bool = False) -> Verdict:
    _require_domain(A, x, "A")
    _require_domain(B, x, "B")
    left, right = identity_ii_sides(A, B, x)
    return _identity(CheckId.IDENT_ii, left, right, x.p, seed, mutate)


def check_hrs_iii(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                  mutate: bool = False) -> Verdict:
    """``max(D(A), D(B)) >= sqrt|<(A*A+B*B)x,x> - (<(A+B)x,x>^2 + <(A-B)x,x>^2)/2|``."""
    _require_pair(A, B, x)
    gram = adjoint(A).compose(A) + adjoint(B).compose(B)
    s, d = expectation(A + B, x), expectation(A - B, x)
    value = expectation(gram, x) - (s * s + d * d) / 2
    rhs = exp_half(abs_exp(value, x.p))
    return _inequality(CheckId.HRS_iii, _spread(A, B, x), rhs, seed, mutate)


def check_hrs_iv(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                 mutate: bool = False) -> Verdict:
    """``max(D(A), D(B)) >= sqrt|<(A*A-B*B)x,x> - <(A+B)x,x><(A-B)x,x>|``."""
    _require_pair(A, B, x)
    gram = adjoint(A).compose(A) - adjoint(B).compose(B)
    value = expectation(gram, x) - expectation(A + B, x) * expectation(A - B, x)
    rhs = exp_half(abs_exp(value, x.p))
    return _inequality(CheckId.HRS_iv, _spread(A, B, x), rhs, seed, mutate)


def _variance(T: POperator, x: PVector) -> Rational:
    Tx = apply(T, x)
    t = inner(Tx, x)
    return inner(Tx, Tx) - t * t


def check_hrs_v(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                mutate: bool = False) -> Verdict:
    """``max(D(A), D(B)) >= sqrt|<(A+B)x,(A+B)x> - <(A+B)x,x>^2|``."""
    _require_pair(A, B, x)
    rhs = exp_half(abs_exp(_variance(A + B, x), x.p))
    return _inequality(CheckId.HRS_v, _spread(A, B, x), rhs, seed, mutate)


def check_hrs_vi(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                 mutate: bool = False) -> Verdict:
    """``max(D(A), D(B)) >= sqrt|<(A-B)x,(A-B)x> - <(A-B)x,x>^2|``."""
    _require_pair(A, B, x)
    rhs = exp_half(abs_exp(_variance(A - B, x), x.p))
    return _inequality(CheckId.HRS_vi, _spread(A, B, x), rhs, seed, mutate)


def require_witness(x: PVector, y: PVector) -> None:
    if y.p != x.p or y.dim != x.dim:
        raise HypothesisError("witness y lives in a different space than x")
    if inner(x, y) != 0:
        raise HypothesisError("witness violated: <x,y> != 0")
    if not norm(y) <= Exponent(0):
        raise HypothesisError("witness violated: ||y|| > 1")


def check_mp(A: POperator, B: POperator, x: PVector, y: PVector, sign: str = "+", *,
             seed: str = "", mutate: bool = False) -> Verdict:
    """``max(D(A), D(B)) >= |<(A +/- B)x, y>|`` for ``||y|| <= 1``, ``<x,y> = 0``."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    _require_pair(A, B, x)
    require_witness(x, y)
    T = A + B if sign == "+" else A - B
    rhs = abs_exp(inner(apply(T, x), y), x.p)
    check = CheckId.MP_plus if sign == "+" else CheckId.MP_minus
    return _inequality(check, _spread(A, B, x), rhs, seed, mutate)


def check_notes(A: POperator, B: POperator, x: PVector, *, seed: str = "",
                mutate: bool = False) -> tuple[Verdict, Verdict]:
    """For self-adjoint A, B: ``<[A,B]x,x> = 0`` and ``<{A,B}x,x> = 2<ABx,x>``.

    The first is recorded as ``<BAx,x> + <[A,B]x,x> = <BAx,x>`` so that both
    sides carry a magnitude; it holds exactly when ``<[A,B]x,x> = 0``.
    """
    _require_selfadjoint(A, B, CheckId.NOTE_comm_zero)
    _require_domain(A, x, "A")
    _require_domain(B, x, "B")
    ab_x = expectation(A.compose(B), x)
    ba_x = expectation(B.compose(A), x)
    comm = expectation(commutator(A, B), x)
    anti = expectation(anticommutator(A, B), x)
    first = _identity(CheckId.NOTE_comm_zero, ba_x + comm, ba_x, x.p, seed, mutate)
    second = _identity(CheckId.NOTE_anticomm_double, anti, 2 * ab_x, x.p, seed, mutate)
    return first, second


CHECKERS = {
    CheckId.HRS_i: check_hrs_i,
    CheckId.HRS_ii: check_hrs_ii,
    CheckId.HRS_ii_product: check_hrs_ii_product,
    CheckId.HRS_iii: check_hrs_iii,
    CheckId.HRS_iv: check_hrs_iv,
    CheckId.HRS_v: check_hrs_v,
    CheckId.HRS_vi: check_hrs_vi,
    CheckId.IDENT_ii: check_identity_ii,
}

