"""Linear operators on K^d and on finitely supported c0.

Dense operators are d x d rational matrices.  Diagonal operators act
pointwise on c0 with ``a_n`` given by explicit overrides on finitely many
indices and otherwise by an *entry rule*: a finite sum
``sum_m c_m * p**(m*n)``.  A rule with a negative ``m`` has ``|a_n| -> oo``,
which is how unbounded operators are modelled; their domain is the
finitely supported vectors.

With the symmetric bilinear form the adjoint of a matrix is its transpose,
and every diagonal operator is self-adjoint.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from .exact_field import Prime, Rational, RationalLike, format_rational, to_rational
from .space import C0, PVector, SpaceMismatch


class Domain(enum.Enum):
    ALL_OF_KD = "all_of_kd"
    FINITELY_SUPPORTED = "finitely_supported"


@dataclass(frozen=True)
class DomainDescriptor:
    kind: Domain
    dim: Union[int, str]

    def contains(self, x: PVector) -> bool:
        if self.kind is Domain.ALL_OF_KD:
            return x.dim == self.dim
        # PVector is finitely supported by construction
        return True


# ---------------------------------------------------------------------------
# entry rules for diagonal operators
# ---------------------------------------------------------------------------

_TERM = re.compile(r"^(?:(?P<coef>[+-]?\d+(?:/\d+)?)\*)?pow_p:(?P<m>[+-]?\d*)n$")


@dataclass(frozen=True)
class EntryRule:
    """``a_n = sum_m coef[m] * p**(m*n)``, stored as sorted ``(m, coef)`` pairs."""

    terms: tuple[tuple[int, Rational], ...] = ()

    @classmethod
    def from_mapping(cls, terms: Mapping[int, RationalLike]) -> "EntryRule":
        items = tuple(
            (int(m), to_rational(c)) for m, c in sorted(terms.items()) if to_rational(c) != 0
        )
        return cls(items)

    @classmethod
    def power(cls, m: int, coef: RationalLike = 1) -> "EntryRule":
        return cls.from_mapping({m: coef})

    @classmethod
    def constant(cls, c: RationalLike) -> "EntryRule":
        return cls.from_mapping({0: c})

    def at(self, n: int, p: int) -> Rational:
        total = Rational(0)
        for m, c in self.terms:
            total += c * Rational(p) ** (m * n)
        return total

    def __add__(self, other: "EntryRule") -> "EntryRule":
        acc: dict[int, Rational] = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, 0) + c
        return EntryRule.from_mapping(acc)

    def __neg__(self) -> "EntryRule":
        return EntryRule(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "EntryRule") -> "EntryRule":
        return self + (-other)

    def __mul__(self, other: "EntryRule") -> "EntryRule":
        acc: dict[int, Rational] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                acc[m1 + m2] = acc.get(m1 + m2, 0) + c1 * c2
        return EntryRule.from_mapping(acc)

    def scaled(self, alpha: Rational) -> "EntryRule":
        return EntryRule.from_mapping({m: alpha * c for m, c in self.terms})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            mult = {1: "", -1: "-"}.get(m, str(m))
            term = f"pow_p:{mult}n"
            parts.append(term if c == 1 else f"{format_rational(c)}*{term}")
        return " + ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "EntryRule":
        """Inverse of ``str``: e.g. ``"pow_p:-n"``, ``"3/2*pow_p:0n + pow_p:2n"``."""
        text = text.strip()
        if text == "0":
            return cls()
        acc: dict[int, Rational] = {}
        for raw in text.split("+ "):
            match = _TERM.match(raw.strip())
            if match is None:
                raise ValueError(f"malformed entry rule term {raw.strip()!r}")
            m_text = match.group("m")
            m = {"": 1, "-": -1, "+": 1}.get(m_text)
            if m is None:
                m = int(m_text)
            coef = to_rational(match.group("coef")) if match.group("coef") else Rational(1)
            acc[m] = acc.get(m, 0) + coef
        return cls.from_mapping(acc)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


class Operator:
    """Shared arithmetic; subclasses implement the representation."""

    p: Prime

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def __rmul__(self, alpha):
        return self.scaled(alpha)

    def __matmul__(self, other):
        return self.compose(other)

    def __call__(self, x: PVector) -> PVector:
        return apply(self, x)


@dataclass(frozen=True)
class DenseOperator(Operator):
    p: Prime
    rows: tuple[tuple[Rational, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "p", Prime(self.p))
        d = len(self.rows)
        if d == 0 or any(len(r) != d for r in self.rows):
            raise ValueError("dense operator must be a nonempty square matrix")
        object.__setattr__(
            self, "rows", tuple(tuple(to_rational(v) for v in r) for r in self.rows)
        )

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[RationalLike]]) -> "DenseOperator":
        return cls(p, tuple(tuple(to_rational(v) for v in r) for r in rows))

    @classmethod
    def identity(cls, p: int, d: int) -> "DenseOperator":
        return cls.diag(p, [1] * d)

    @classmethod
    def diag(cls, p: int, values: Sequence[RationalLike]) -> "DenseOperator":
        d = len(values)
        return cls.from_rows(
            p, [[values[i] if i == j else 0 for j in range(d)] for i in range(d)]
        )

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def domain(self) -> DomainDescriptor:
        return DomainDescriptor(Domain.ALL_OF_KD, self.dim)

    def _check(self, other: "DenseOperator") -> None:
        if not isinstance(other, DenseOperator):
            raise SpaceMismatch("cannot combine dense and diagonal operators")
        if other.p != self.p or other.dim != self.dim:
            raise SpaceMismatch(
                f"operator mismatch: p={self.p}, d={self.dim} vs p={other.p}, d={other.dim}"
            )

    def transpose(self) -> "DenseOperator":
        return DenseOperator(self.p, tuple(zip(*self.rows)))

    def compose(self, other: "DenseOperator") -> "DenseOperator":
        """Matrix of ``self . other``."""
        self._check(other)
        cols = list(zip(*other.rows))
        rows = tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), Rational(0)) for c in cols)
            for r in self.rows
        )
        return DenseOperator(self.p, rows)

    def _combine(self, other: "DenseOperator", sign: int) -> "DenseOperator":
        self._check(other)
        rows = tuple(
            tuple(a + sign * b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)
        )
        return DenseOperator(self.p, rows)

    def scaled(self, alpha: RationalLike) -> "DenseOperator":
        a = to_rational(alpha)
        return DenseOperator(self.p, tuple(tuple(a * v for v in r) for r in self.rows))

    def to_json(self) -> dict:
        return {
            "p": int(self.p),
            "kind": "dense",
            "rows": [[format_rational(v) for v in r] for r in self.rows],
        }


@dataclass(frozen=True)
class DiagonalOperator(Operator):
    """Pointwise multiplication ``(a_n x_n)`` on finitely supported sequences."""

    p: Prime
    entries: Mapping[int, Rational] = field(default_factory=dict)
    rule: EntryRule = field(default_factory=EntryRule)

    def __post_init__(self):
        object.__setattr__(self, "p", Prime(self.p))
        clean = {int(n): to_rational(v) for n, v in sorted(self.entries.items())}
        if any(n < 0 for n in clean):
            raise ValueError("diagonal indices must be non-negative")
        object.__setattr__(self, "entries", clean)
        if isinstance(self.rule, str):
            object.__setattr__(self, "rule", EntryRule.parse(self.rule))

    def __hash__(self) -> int:
        return hash((self.p, tuple(self.entries.items()), self.rule))

    @property
    def domain(self) -> DomainDescriptor:
        return DomainDescriptor(Domain.FINITELY_SUPPORTED, C0)

    def entry(self, n: int) -> Rational:
        v = self.entries.get(n)
        return self.rule.at(n, self.p) if v is None else v

    def _check(self, other: "DiagonalOperator") -> None:
        if not isinstance(other, DiagonalOperator):
            raise SpaceMismatch("cannot combine dense and diagonal operators")
        if other.p != self.p:
            raise SpaceMismatch(f"prime mismatch: {self.p} vs {other.p}")

    def _pointwise(self, other: "DiagonalOperator", op, rule: EntryRule) -> "DiagonalOperator":
        keys = set(self.entries) | set(other.entries)
        entries = {n: op(self.entry(n), other.entry(n)) for n in keys}
        return DiagonalOperator(self.p, entries, rule)

    def compose(self, other: "DiagonalOperator") -> "DiagonalOperator":
        self._check(other)
        return self._pointwise(other, lambda a, b: a * b, self.rule * other.rule)

    def _combine(self, other: "DiagonalOperator", sign: int) -> "DiagonalOperator":
        self._check(other)
        rule = self.rule + other.rule if sign > 0 else self.rule - other.rule
        return self._pointwise(other, lambda a, b: a + sign * b, rule)

    def scaled(self, alpha: RationalLike) -> "DiagonalOperator":
        a = to_rational(alpha)
        return DiagonalOperator(
            self.p, {n: a * v for n, v in self.entries.items()}, self.rule.scaled(a)
        )

    def to_json(self) -> dict:
        return {
            "p": int(self.p),
            "kind": "diagonal",
            "entries": {str(n): format_rational(v) for n, v in self.entries.items()},
            "rule": str(self.rule),
        }


POperator = Union[DenseOperator, DiagonalOperator]


def operator_from_json(obj: Mapping) -> POperator:
    kind = obj.get("kind")
    if kind == "dense":
        return DenseOperator.from_rows(obj["p"], obj["rows"])
    if kind == "diagonal":
        entries = {int(n): to_rational(v) for n, v in obj.get("entries", {}).items()}
        return DiagonalOperator(obj["p"], entries, EntryRule.parse(obj.get("rule", "0")))
    raise ValueError(f"unknown operator kind {kind!r}")


def apply(A: POperator, x: PVector) -> PVector:
    if A.p != x.p:
        raise SpaceMismatch(f"prime mismatch: operator {A.p}, vector {x.p}")
    if isinstance(A, DiagonalOperator):
        return PVector.from_mapping(x.p, x.dim, {i: A.entry(i) * v for i, v in x.coords})
    if x.dim != A.dim:
        raise SpaceMismatch(f"dimension mismatch: operator {A.dim}, vector {x.dim}")
    out = {}
    for i, row in enumerate(A.rows):
        s = Rational(0)
        for j, v in x.coords:
            a = row[j]
            if a:
                s += a * v
        out[i] = s
    return PVector.from_mapping(x.p, x.dim, out)


def adjoint(A: POperator) -> POperator:
    if isinstance(A, DiagonalOperator):
        return A
    return A.transpose()


def is_selfadjoint(A: POperator) -> bool:
    if isinstance(A, DiagonalOperator):
        return True
    return A.rows == A.transpose().rows


def compose(A: POperator, B: POperator) -> POperator:
    """``A . B``, i.e. B is applied first."""
    return A.compose(B)


def commutator(A: POperator, B: POperator) -> POperator:
    return A.compose(B) - B.compose(A)


def anticommutator(A: POperator, B: POperator) -> POperator:
    return A.compose(B) + B.compose(A)
