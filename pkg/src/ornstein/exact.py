"""Exact arithmetic on lattice frequencies, multiindices and rational intervals.

Lattice vectors and multiindices are plain tuples of Python ints, rationals are
:class:`fractions.Fraction`.  Nothing in this module touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import gmpy2

Vec = tuple[int, ...]


def as_vec(v: Sequence[int]) -> Vec:
    out = tuple(int(c) for c in v)
    if len(out) == 0:
        raise ValueError("empty vector")
    return out


def as_multiindex(alpha: Sequence[int]) -> Vec:
    out = as_vec(alpha)
    if any(a < 0 for a in out):
        raise ValueError(f"multiindex entries must be nonnegative: {out}")
    return out


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum(int(a) * int(b) for a, b in zip(u, v))


def neg(q: Vec) -> Vec:
    return tuple(-c for c in q)


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sup_norm(q: Sequence[int]) -> int:
    return max(abs(c) for c in q)


def mod1(q: Sequence[int], x: Sequence[Rational]) -> Fraction:
    """Return <q, x> - floor(<q, x>) exactly."""
    if len(q) != len(x):
        raise ValueError(f"dimension mismatch: {len(q)} vs {len(x)}")
    s = sum((int(a) * Fraction(b) for a, b in zip(q, x)), Fraction(0))
    return s - math.floor(s)


def monomial(q: Sequence[int], alpha: Sequence[int]) -> int:
    """Symbol q^alpha = prod_i q(i)**alpha(i) (an exact integer)."""
    if len(q) != len(alpha):
        raise ValueError(f"dimension mismatch: {len(q)} vs {len(alpha)}")
    out = 1
    for c, a in zip(q, alpha):
        if a < 0:
            raise ValueError("negative exponent in multiindex")
        out *= int(c) ** a
    return out


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __pow__(self, k: int) -> "RationalInterval":
        if k < 0:
            raise ValueError("negative power")
        if k == 0:
            return RationalInterval(Fraction(1), Fraction(1))
        a, b = self.lo**k, self.hi**k
        if k % 2 == 1:
            return RationalInterval(a, b)
        if self.lo >= 0:
            return RationalInterval(a, b)
        if self.hi <= 0:
            return RationalInterval(b, a)
        return RationalInterval(Fraction(0), max(a, b))

    def distance_to(self, t) -> Fraction:
        """Largest |v - t| over v in the interval."""
        t = Fraction(t)
        return max(abs(self.lo - t), abs(self.hi - t))


def sqrt_interval(n: int, width=Fraction(1, 10**12)) -> RationalInterval:
    """Rational enclosure [lo, hi] of 1/sqrt(n) with hi - lo <= width.

    Perfect squares give the exact point.
    """
    n = int(n)
    if n <= 0:
        raise ValueError("n must be positive")
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    r = math.isqrt(n)
    if r * r == n:
        return RationalInterval(Fraction(1, r), Fraction(1, r))
    # floor(D / sqrt(n)) == isqrt(D*D // n)
    D = math.ceil(1 / width)
    k = math.isqrt(D * D // n)
    return RationalInterval(Fraction(k, D), Fraction(k + 1, D))


def simplest_between(lo, hi) -> Fraction:
    """Rational with the smallest denominator in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("lo > hi")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    fl = math.floor(lo)
    if fl == lo:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo, hi share the integer part: recurse on reciprocals of the fractional parts
    return fl + 1 / simplest_between(1 / (hi - fl), 1 / (lo - fl))


def rational_inv_sqrt(n: int, tol) -> Fraction:
    """Simplest rational tau with |tau - 1/sqrt(n)| <= tol (exact for squares)."""
    iv = sqrt_interval(n, Fraction(tol) / 2)
    if iv.lo == iv.hi:
        return iv.lo
    # iv has width <= tol/2 and contains 1/sqrt(n), so widening by tol/2 stays within tol
    return simplest_between(iv.hi - Fraction(tol) / 2, iv.lo + Fraction(tol) / 2)


def int_str(k: int) -> str:
    """Decimal string of an integer of any size (no interpreter digit limit)."""
    return gmpy2.mpz(k).digits(10)


def parse_int(s) -> int:
    if isinstance(s, int):
        return s
    return int(gmpy2.mpz(str(s).strip(), 10))


def fraction_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return int_str(x.numerator)
    return f"{int_str(x.numerator)}/{int_str(x.denominator)}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    s = str(s).strip()
    if "." in s or "e" in s.lower():
        return Fraction(s)
    num, _, den = str(s).partition("/")
    return Fraction(parse_int(num), parse_int(den) if den else 1)


def ceil_dyadic(num: int, den: int, bits: int = 64) -> Fraction:
    """Smallest k / 2**e >= num/den with k of about `bits` significant bits.

    Used to keep certified upper bounds short when exact values would carry
    enormous denominators.  num >= 0, den > 0.
    """
    if den <= 0 or num < 0:
        raise ValueError("need num >= 0 and den > 0")
    if num == 0:
        return Fraction(0)
    e = bits - (num.bit_length() - den.bit_length())
    if e >= 0:
        k = -((-(num << e)) // den)
        return Fraction(int(k), 1 << e)
    k = -((-num) // (den << -e))
    return Fraction(int(k) << -e)
