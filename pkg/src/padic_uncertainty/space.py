"""The spaces K^d and finitely supported c0 over (Q, |.|_p).

Both carry the max-norm and the symmetric bilinear form
``<x, y> = sum_j x_j y_j``.  Vectors store only their nonzero coordinates,
so a c0 vector and a K^d vector share one representation and differ only in
the ``dim`` tag.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .exact_field import (
    NEG_INF,
    Exponent,
    Prime,
    Rational,
    RationalLike,
    abs_exp,
    exp_max,
    format_rational,
    to_rational,
)

C0 = "c0"
Dim = Union[int, str]


class SpaceMismatch(ValueError):
    """Vectors or operators from different primes or dimensions were combined."""


def _check_dim(dim: Dim) -> Dim:
    if dim == C0:
        return C0
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ValueError(f"dim must be a positive int or {C0!r}, got {dim!r}")
    return dim


@dataclass(frozen=True)
class PVector:
    p: Prime
    dim: Dim
    coords: tuple[tuple[int, Rational], ...]

    def __post_init__(self):
        object.__setattr__(self, "p", Prime(self.p))
        object.__setattr__(self, "dim", _check_dim(self.dim))
        last = -1
        for i, v in self.coords:
            if not isinstance(i, int) or i <= last:
                raise ValueError("coordinate indices must be strictly increasing ints")
            if not isinstance(v, Rational) or v == 0:
                raise ValueError(f"coordinate {i} must be a nonzero Rational")
            last = i
        if self.dim != C0 and last >= self.dim:
            raise ValueError(f"index {last} out of range for dim {self.dim}")

    @classmethod
    def from_mapping(cls, p: int, dim: Dim, values: Mapping[int, RationalLike]) -> "PVector":
        items = []
        for i in sorted(values):
            v = to_rational(values[i])
            if v != 0:
                items.append((int(i), v))
        return cls(p, dim, tuple(items))

    @classmethod
    def from_dense(cls, p: int, values: Sequence[RationalLike], dim: Dim | None = None) -> "PVector":
        return cls.from_mapping(p, len(values) if dim is None else dim, dict(enumerate(values)))

    @classmethod
    def zero(cls, p: int, dim: Dim) -> "PVector":
        return cls(p, dim, ())

    @classmethod
    def basis(cls, p: int, dim: Dim, j: int) -> "PVector":
        return cls(p, dim, ((j, Rational(1)),))

    def __getitem__(self, i: int) -> Rational:
        for j, v in self.coords:
            if j == i:
                return v
        return Rational(0)

    def as_dict(self) -> dict[int, Rational]:
        return dict(self.coords)

    def dense(self) -> list[Rational]:
        if self.dim == C0:
            raise ValueError("c0 vectors have no dense form")
        out = [Rational(0)] * self.dim
        for i, v in self.coords:
            out[i] = v
        return out

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coords)

    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other: "PVector") -> "PVector":
        return add(self, other)

    def __sub__(self, other: "PVector") -> "PVector":
        return sub(self, other)

    def __neg__(self) -> "PVector":
        return scale(-1, self)

    def __rmul__(self, alpha: RationalLike) -> "PVector":
        return scale(alpha, self)

    def to_json(self) -> dict:
        return {
            "p": int(self.p),
            "dim": self.dim,
            "coords": [[i, format_rational(v)] for i, v in self.coords],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "PVector":
        dim = obj["dim"]
        values = {}
        for i, v in obj["coords"]:
            if int(i) in values:
                raise ValueError(f"duplicate coordinate index {i}")
            values[int(i)] = to_rational(v)
        return cls.from_mapping(obj["p"], dim, values)


def check_compatible(x: PVector, y: PVector) -> None:
    if x.p != y.p:
        raise SpaceMismatch(f"prime mismatch: {x.p} vs {y.p}")
    if x.dim != y.dim:
        raise SpaceMismatch(f"dimension mismatch: {x.dim} vs {y.dim}")


def norm(x: PVector) -> Exponent:
    """``max_j |x_j|_p``; the zero vector has the zero magnitude."""
    out = NEG_INF
    for _, v in x.coords:
        out = exp_max(out, abs_exp(v, x.p))
    return out


def inner(x: PVector, y: PVector) -> Rational:
    check_compatible(x, y)
    if len(y.coords) < len(x.coords):
        x, y = y, x
    ys = dict(y.coords)
    total = Rational(0)
    for i, v in x.coords:
        w = ys.get(i)
        if w is not None:
            total += v * w
    return total


def _combine(x: PVector, y: PVector, sign: int) -> PVector:
    check_compatible(x, y)
    acc = dict(x.coords)
    for i, v in y.coords:
        acc[i] = acc.get(i, 0) + sign * v
    return PVector.from_mapping(x.p, x.dim, acc)


def add(x: PVector, y: PVector) -> PVector:
    return _combine(x, y, 1)


def sub(x: PVector, y: PVector) -> PVector:
    return _combine(x, y, -1)


def scale(alpha: RationalLike, x: PVector) -> PVector:
    a = to_rational(alpha)
    if a == 0:
        return PVector.zero(x.p, x.dim)
    return PVector(x.p, x.dim, tuple((i, a * v) for i, v in x.coords))


def random_rational(rng: random.Random, size_bound: int, p: int | None = None) -> Rational:
    """Numerator in [-B, B], denominator in [1, B]; with p given, half the draws
    are multiplied by ``p**k`` for k in [-2, 2] to spread valuations."""
    q = Rational(rng.randint(-size_bound, size_bound), rng.randint(1, size_bound))
    if p is not None and rng.random() < 0.5:
        q *= Rational(p) ** rng.randint(-2, 2)
    return q


def random_vector(
    p: int, dim: Dim, rng: random.Random, size_bound: int, support: Iterable[int] | None = None
) -> PVector:
    """Random vector; c0 vectors need an explicit ``support``."""
    if support is None:
        if dim == C0:
            raise ValueError("a c0 random vector needs an explicit support")
        support = range(dim)
    return PVector.from_mapping(p, dim, {i: random_rational(rng, size_bound, p) for i in support})


def stereographic_point(p: int, u: Sequence[RationalLike], dim: Dim | None = None,
                        support: Sequence[int] | None = None) -> PVector:
    """Map ``u`` in Q^(d-1) onto the quadric ``sum x_j^2 = 1``.

    ``x_1 = (1-s)/(1+s)`` and ``x_{j+1} = 2 u_j / (1+s)`` with ``s = sum u_j^2``.
    Coordinates land on ``support`` (default ``0..d-1``).
    """
    u = [to_rational(t) for t in u]
    d = len(u) + 1
    if support is None:
        support = range(d)
    if len(support) != d:
        raise ValueError("support length must be len(u) + 1")
    s = sum((t * t for t in u), Rational(0))
    denom = 1 + s
    values = [(1 - s) / denom] + [2 * t / denom for t in u]
    return PVector.from_mapping(p, d if dim is None else dim, dict(zip(support, values)))


def sample_normalized(
    p: int,
    d: int,
    rng: random.Random,
    size_bound: int,
    *,
    dim: Dim | None = None,
    support: Sequence[int] | None = None,
) -> PVector:
    """A vector with ``<x, x> = 1`` exactly, drawn via the stereographic map.

    For c0 pass ``dim="c0"`` and a ``support`` of ``d`` indices.
    """
    if d < 2:
        raise ValueError("need d >= 2 for a nontrivial unit quadric")
    u = [random_rational(rng, size_bound, p) for _ in range(d - 1)]
    return stereographic_point(p, u, dim=dim, support=support)


def orthogonal_witness(
    x: PVector,
    rng: random.Random | None = None,
    size_bound: int = 8,
    *,
    z: PVector | None = None,
    unit: bool = False,
    extra_support: Iterable[int] = (),
) -> PVector:
    """Project ``z`` onto the orthogonal complement of a normalized ``x`` and
    rescale by a power of p so that ``||y|| <= 1``.

    ``w = z - <z, x> x`` satisfies ``<x, w> = 0`` because ``<x, x> = 1``.
    By default ``w`` is only scaled down when its norm exceeds 1; with
    ``unit=True`` it is scaled to norm exactly 1.  ``w = 0`` is returned as is.
    """
    if inner(x, x) != 1:
        raise ValueError("orthogonal_witness needs <x, x> = 1")
    if z is None:
        if rng is None:
            raise ValueError("need either z or rng")
        support = sorted(set(x.support) | set(extra_support))
        if x.dim != C0:
            support = range(x.dim)
        z = random_vector(x.p, x.dim, rng, size_bound, support=support)
    w = z - inner(z, x) * x
    e = norm(w)
    if e.is_zero:
        return w
    k = e.twice // 2  # norms of rational vectors have integer exponents
    if not unit:
        k = max(0, k)
    # |p^k| = p^(-k), so p^k * w has norm exponent e - k
    return (Rational(x.p) ** k) * w
