import random

import pytest
from hypothesis import given, settings, strategies as st

from padic_uncertainty.campaign import OPERATOR_CLASSES, generate_instance
from padic_uncertainty.exact_field import Exponent, Rational
from padic_uncertainty.operators import DenseOperator, DiagonalOperator, EntryRule
from padic_uncertainty.space import C0, PVector
from padic_uncertainty.uncertainty import (
    CHECKERS,
    CheckId,
    HypothesisError,
    Verdict,
    check_hrs_ii,
    check_hrs_ii_product,
    check_hrs_iv,
    check_identity_ii,
    check_mp,
    check_notes,
    delta,
    identity_ii_sides,
    residual,
)

import oracle

WORKED_X = PVector.from_dense(5, ["3/5", "4/5"])
WORKED_A = DenseOperator.diag(5, [1, 2])


def test_worked_example_delta():
    r = residual(WORKED_A, WORKED_X)
    assert r.dense() == [Rational(-48, 125), Rational(36, 125)]
    assert delta(WORKED_A, WORKED_X) == Exponent.of(3)
    assert oracle.twice_delta([[1, 0], [0, 2]], ["3/5", "4/5"], 5) == 6


def test_delta_requires_normalized():
    with pytest.raises(HypothesisError, match="<x,x> != 1"):
        delta(WORKED_A, PVector.from_dense(5, [1, 1]))


def test_scalar_shift_invariance():
    rng = random.Random(5)
    for trial in range(40):
        inst = generate_instance((3, 3, "general"), trial, 11)
        c = Rational(rng.randint(-20, 20), rng.randint(1, 20))
        shifted = inst.A + c * DenseOperator.identity(3, 3)
        assert delta(shifted, inst.x) == delta(inst.A, inst.x)


def test_hrs_ii_counterexample_is_reported():
    # max(D(A), D(B)) is 5 but sqrt|Q|/sqrt|2| is 25
    A = DenseOperator.from_rows(5, [[0, "1/5"], ["1/5", 0]])
    x = PVector.basis(5, 2, 0)
    v = check_hrs_ii(A, A, x)
    assert not v.holds
    assert (v.lhs, v.rhs) == (Exponent.of(1), Exponent.of(2))
    assert oracle.sides("HRS_ii", A.rows, A.rows, x.dense(), 5) == (2, 4)
    assert check_hrs_ii_product(A, A, x).holds


def test_hrs_ii_worked_pair_is_reported():
    v = check_hrs_ii(WORKED_A, WORKED_A, WORKED_X)
    assert not v.holds and v.lhs == Exponent.of(3) and v.rhs == Exponent.of(4)


def test_hrs_ii_p2_branch():
    # |2|_2 = 1/2: the right side is divided by 2^(-1/2), i.e. twice exponent + 1
    A = DenseOperator.from_rows(2, [[1, 1], [1, 0]])
    B = DenseOperator.from_rows(2, [[0, 1], [1, 1]])
    x = PVector.from_dense(2, ["3/5", "4/5"])
    v = check_hrs_ii_product(A, B, x)
    lhs, rhs = oracle.sides("HRS_ii_product", A.rows, B.rows, x.dense(), 2)
    assert (v.lhs.twice, v.rhs.twice) == (lhs, rhs)
    assert rhs % 2 == 1


def test_selfadjoint_precondition():
    A = DenseOperator.from_rows(3, [[1, 2], [0, 1]])
    x = PVector.basis(3, 2, 0)
    with pytest.raises(HypothesisError, match="needs A self-adjoint"):
        check_hrs_ii(A, A, x)
    with pytest.raises(HypothesisError):
        check_notes(DenseOperator.identity(3, 2), A, x)


def test_identity_holds_for_nonsymmetric_and_unnormalized():
    A = DenseOperator.from_rows(7, [[1, 2], [3, 4]])
    B = DenseOperator.from_rows(7, [[0, "1/7"], [5, -1]])
    x = PVector.from_dense(7, [2, "1/3"])
    left, right = identity_ii_sides(A, B, x)
    assert (left, right) == tuple(Rational(str(v)) for v in oracle.identity_ii(A.rows, B.rows, x.dense()))
    assert check_identity_ii(A, B, x).holds


def test_notes_fail_for_nonsymmetric_values():
    # the relations themselves need symmetry; checked here on raw numbers
    A = DenseOperator.from_rows(5, [[0, 1], [0, 0]])
    B = DenseOperator.from_rows(5, [[0, 0], [1, 0]])
    x = PVector.basis(5, 2, 0)
    AB, BA = oracle.matmul(A.rows, B.rows), oracle.matmul(B.rows, A.rows)
    assert oracle.dot(oracle.matvec(oracle.madd(AB, BA, -1), x.dense()), x.dense()) != 0


def test_degenerate_and_tight_flags():
    A = DenseOperator.from_rows(5, [[1, 2], [2, 3]])
    v = check_hrs_iv(A, A, WORKED_X)
    assert v.holds and v.degenerate and v.rhs.is_zero
    y = PVector.zero(5, 2)
    m = check_mp(A, A, WORKED_X, y)
    assert m.degenerate and m.holds


def test_mp_witness_preconditions():
    with pytest.raises(HypothesisError, match="<x,y> != 0"):
        check_mp(WORKED_A, WORKED_A, WORKED_X, PVector.basis(5, 2, 0))
    big = PVector.from_dense(5, ["4/5", "-3/5"])
    with pytest.raises(HypothesisError, match=r"\|\|y\|\| > 1"):
        check_mp(WORKED_A, WORKED_A, WORKED_X, big)
    with pytest.raises(ValueError):
        check_mp(WORKED_A, WORKED_A, WORKED_X, PVector.zero(5, 2), "*")


def test_mutation_flips_verdicts():
    A = DenseOperator.from_rows(5, [[1, 2], [2, 3]])
    B = DenseOperator.from_rows(5, [[0, 1], [1, 1]])
    for check, fn in CHECKERS.items():
        if check is CheckId.HRS_ii:
            continue
        normal, mutated = fn(A, B, WORKED_X), fn(A, B, WORKED_X, mutate=True)
        if not normal.tight:
            assert normal.holds != mutated.holds


def test_verdict_json_roundtrip():
    v = check_hrs_ii(WORKED_A, WORKED_A, WORKED_X, seed="s")
    assert Verdict.from_json(v.to_json()) == v


def test_c0_unbounded_operator():
    x = PVector.from_mapping(3, C0, {10: "3/5", 20: "4/5"})
    A = DiagonalOperator(3, {}, EntryRule.power(-1))
    B = DiagonalOperator(3, {}, EntryRule.constant(2))
    M = [[Rational(1, 3**10), 0], [0, Rational(1, 3**20)]]
    assert delta(A, x).twice == oracle.twice_delta(M, ["3/5", "4/5"], 3) == 38
    assert check_hrs_ii_product(A, B, x).holds


# -- cross-check every checker against the oracle ------------------------------

def dense_view(inst):
    """Restrict an instance to a finite index set so the oracle can use lists."""
    if inst.x.dim != C0:
        return inst.A.rows, inst.B.rows, inst.x.dense(), [y.dense() for y in inst.witnesses]
    idx = sorted(set(inst.x.support).union(*(y.support for y in inst.witnesses)))

    def mat(T):
        return [[T.entry(i) if i == j else 0 for j in idx] for i in idx]

    def vec(v):
        return [v[i] for i in idx]

    return mat(inst.A), mat(inst.B), vec(inst.x), [vec(y) for y in inst.witnesses]


ORACLE_CHECKS = ["HRS_i", "HRS_ii", "HRS_ii_product", "HRS_iii", "HRS_iv", "HRS_v", "HRS_vi"]


@settings(max_examples=150, deadline=None)
@given(
    st.sampled_from([2, 3, 5, 7]),
    st.integers(2, 4),
    st.sampled_from(OPERATOR_CLASSES),
    st.integers(0, 10**6),
)
def test_checkers_agree_with_oracle(p, d, cls, trial):
    inst = generate_instance((p, d, cls), trial, 7)
    M, N, x, ys = dense_view(inst)
    selfadjoint = cls != "general"
    for name in ORACLE_CHECKS:
        check = CheckId(name)
        if check in (CheckId.HRS_ii, CheckId.HRS_ii_product) and not selfadjoint:
            continue
        v = CHECKERS[check](inst.A, inst.B, inst.x)
        assert (v.lhs.twice, v.rhs.twice) == oracle.sides(name, M, N, x, p), name
        assert v.holds == oracle.holds(name, M, N, x, p)
    for y_obj, y in zip(inst.witnesses, ys):
        for name, sign in (("MP_plus", "+"), ("MP_minus", "-")):
            v = check_mp(inst.A, inst.B, inst.x, y_obj, sign)
            assert (v.lhs.twice, v.rhs.twice) == oracle.sides(name, M, N, x, p, y)
    left, right = oracle.identity_ii(M, N, x)
    assert left == right


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(2, 5), st.integers(0, 10**6))
def test_proven_bounds_hold(p, d, trial):
    for cls in OPERATOR_CLASSES:
        inst = generate_instance((p, d, cls), trial, 3)
        for name in ("HRS_i", "HRS_iii", "HRS_iv", "HRS_v", "HRS_vi", "IDENT_ii"):
            assert CHECKERS[CheckId(name)](inst.A, inst.B, inst.x).holds, (name, inst.seed)
        if cls != "general":
            assert check_hrs_ii_product(inst.A, inst.B, inst.x).holds
            assert all(v.holds for v in check_notes(inst.A, inst.B, inst.x))
        for y in inst.witnesses:
            assert check_mp(inst.A, inst.B, inst.x, y, "+").holds
            assert check_mp(inst.A, inst.B, inst.x, y, "-").holds
