"""Exact arithmetic in Q with the p-adic valuation.

Magnitudes ``|x|_p = p**e`` are never turned into real numbers.  They are
carried as :class:`Exponent` values storing ``2*e`` as an integer, so the
square roots that show up in the uncertainty bounds stay exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Union

import gmpy2

Rational = gmpy2.mpq
RationalLike = Union[Rational, Fraction, int, str]

MAX_PRIME = 10**6

INF = math.inf  # valuation of zero; used only as a sentinel, never in arithmetic


class Prime(int):
    """An integer checked to be prime at construction."""

    def __new__(cls, p: int) -> "Prime":
        if isinstance(p, Prime):
            return p
        if isinstance(p, bool) or not isinstance(p, int):
            raise TypeError(f"prime must be an int, got {type(p).__name__}")
        if p > MAX_PRIME:
            raise ValueError(f"prime {p} exceeds the supported bound {MAX_PRIME}")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return super().__new__(cls, p)

    def __repr__(self) -> str:
        return f"Prime({int(self)})"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def to_rational(x: RationalLike) -> Rational:
    """Coerce ints, Fractions and ``"num/den"`` strings; floats are refused."""
    if type(x) is Rational:
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, type(gmpy2.mpz()))):
        return Rational(x)
    if isinstance(x, Fraction):
        return Rational(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


def parse_rational(s: str) -> Rational:
    text = s.strip()
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {s!r}") from None
    if d == 0:
        raise ZeroDivisionError(f"zero denominator in {s!r}")
    return Rational(n, d)


def format_rational(x: Rational) -> str:
    """Canonical lowest-terms string, sign on the numerator, ``"7"`` for integers."""
    return str(x)


def _int_valuation(n: int, p: int) -> int:
    return gmpy2.remove(n, p)[1]


def valuation(x: RationalLike, p: int) -> Union[int, float]:
    """``v_p(x)``; returns :data:`INF` exactly when ``x == 0``."""
    x = to_rational(x)
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


@total_ordering
class Exponent:
    """A magnitude ``p**e`` with ``e`` in ½Z, or the magnitude of zero.

    ``twice`` holds ``2*e``; ``None`` encodes the zero magnitude, which sorts
    below every finite exponent.
    """

    __slots__ = ("twice",)

    def __init__(self, twice: int | None):
        if twice is not None and (isinstance(twice, bool) or not isinstance(twice, int)):
            raise TypeError("twice must be an int or None")
        object.__setattr__(self, "twice", twice)

    def __setattr__(self, name, value):
        raise AttributeError("Exponent is immutable")

    @classmethod
    def of(cls, e: RationalLike) -> "Exponent":
        """Build from the exponent itself (must be a multiple of 1/2)."""
        twice = 2 * to_rational(e)
        if twice.denominator != 1:
            raise ValueError(f"exponent {e} is not a half-integer")
        return cls(int(twice))

    @property
    def is_zero(self) -> bool:
        return self.twice is None

    @property
    def value(self) -> Rational | None:
        return None if self.twice is None else Rational(self.twice, 2)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Exponent):
            return NotImplemented
        return self.twice == other.twice

    def __lt__(self, other: "Exponent") -> bool:
        if not isinstance(other, Exponent):
            return NotImplemented
        if self.twice is None:
            return other.twice is not None
        if other.twice is None:
            return False
        return self.twice < other.twice

    def __hash__(self) -> int:
        return hash(("Exponent", self.twice))

    def __add__(self, other: "Exponent") -> "Exponent":
        return exp_add(self, other)

    def __sub__(self, other: "Exponent") -> "Exponent":
        return exp_sub(self, other)

    def half(self) -> "Exponent":
        return exp_half(self)

    def __repr__(self) -> str:
        if self.twice is None:
            return "Exponent(-inf)"
        return f"Exponent(e={format_rational(Rational(self.twice, 2))})"

    def describe(self, p: int) -> str:
        """Human-readable magnitude, e.g. ``5^3 = 125`` or ``2^(1/2)``."""
        if self.twice is None:
            return "0"
        e = Rational(self.twice, 2)
        if e.denominator == 1:
            return f"{p}^{e} = {format_rational(Rational(p) ** int(e))}"
        return f"{p}^({e})"

    def to_json(self) -> dict:
        if self.twice is None:
            return {"tag": "neginf"}
        return {"tag": "finite", "twice": self.twice}

    @classmethod
    def from_json(cls, obj: dict) -> "Exponent":
        tag = obj.get("tag")
        if tag == "neginf":
            return cls(None)
        if tag == "finite":
            return cls(int(obj["twice"]))
        raise ValueError(f"unknown exponent tag {tag!r}")


NEG_INF = Exponent(None)
ONE = Exponent(0)


def abs_exp(x: RationalLike, p: int) -> Exponent:
    """``|x|_p`` as an exponent: ``p**(-v_p(x))``."""
    v = valuation(x, p)
    if v == INF:
        return NEG_INF
    return Exponent(-2 * v)


def exp_add(a: Exponent, b: Exponent) -> Exponent:
    """Magnitude of a product; zero absorbs."""
    if a.twice is None or b.twice is None:
        return NEG_INF
    return Exponent(a.twice + b.twice)


def exp_sub(a: Exponent, b: Exponent) -> Exponent:
    """Magnitude of a quotient ``a / b``; ``b`` must be nonzero."""
    if b.twice is None:
        raise ZeroDivisionError("division by a zero magnitude")
    if a.twice is None:
        return NEG_INF
    return Exponent(a.twice - b.twice)


def exp_half(a: Exponent) -> Exponent:
    """Square root of a magnitude.  Odd ``twice`` values have no half in ½Z."""
    if a.twice is None:
        return NEG_INF
    if a.twice % 2:
        raise ValueError(f"cannot halve {a!r} within half-integer exponents")
    return Exponent(a.twice // 2)


def exp_max(a: Exponent, b: Exponent) -> Exponent:
    return a if b <= a else b


def exp_le(a: Exponent, b: Exponent) -> bool:
    return a <= b


def rat_div(a: RationalLike, b: RationalLike) -> Rational:
    b = to_rational(b)
    if b == 0:
        raise ZeroDivisionError("rational division by zero")
    return to_rational(a) / b
