"""Exact rational helpers shared by every other module.

Scalars are :class:`fractions.Fraction`; vectors are tuples of fractions.
Euclidean norms are always carried as exact squares. The only place an
irrational number shows up is :func:`sqrt_bounds`, which returns a rational
bracket of a square root at a chosen binary precision.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
RationalVector = tuple  # tuple[Fraction, ...]
RationalMatrix = tuple  # tuple[tuple[Fraction, ...], ...]

#: binary digits used when bracketing irrational quantities
DEFAULT_PRECISION_BITS = 128


class InvalidDenominatorError(ValueError):
    pass


def as_rational(x) -> Fraction:
    """Coerce ints, fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected on purpose: they would smuggle rounding into exact code.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, float):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def vec(values: Iterable) -> tuple:
    return tuple(as_rational(v) for v in values)


def floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def frac(x: Fraction) -> Fraction:
    """Fractional part ``x - floor(x)``, always in ``[0, 1)``."""
    x = as_rational(x)
    return Fraction(x.numerator % x.denominator, x.denominator)


def mod1(v: Sequence) -> tuple:
    return tuple(frac(x) for x in v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def norm_sq(v: Sequence) -> Fraction:
    return sum((Fraction(x) * x for x in v), Fraction(0))


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(s, v: Sequence) -> tuple:
    return tuple(s * x for x in v)


def lcm_denominator(values: Iterable[Fraction]) -> int:
    q = 1
    for x in values:
        q = math.lcm(q, Fraction(x).denominator)
    return q


def normalize_multiplier(p: Sequence[int], q: int) -> tuple[tuple[int, ...], int]:
    """Divide ``(p_1, ..., p_m, q)`` by their joint gcd.

    >>> normalize_multiplier((2, 4), 8)
    ((1, 2), 4)
    """
    if q == 0:
        raise InvalidDenominatorError("denominator must be nonzero")
    if q < 0:
        raise InvalidDenominatorError("denominator must be positive")
    g = math.gcd(q, *p) if p else q
    return tuple(pi // g for pi in p), q // g


def common_form(v: Sequence) -> tuple[tuple[int, ...], int]:
    """Write a rational vector as ``p / q`` with one denominator and joint gcd 1."""
    v = vec(v)
    q = lcm_denominator(v)
    return normalize_multiplier(tuple(int(x * q) for x in v), q)


def sqrt_bounds(x, bits: int = DEFAULT_PRECISION_BITS) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= sqrt(x) <= hi`` and ``hi - lo <= 2**-bits``.

    ``lo == hi`` exactly when ``x`` is the square of a rational.
    """
    x = as_rational(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        r = Fraction(rn, rd)
        return r, r
    scale_ = 1 << bits
    # sqrt(n/d) = sqrt(n*d)/d
    s = math.isqrt(n * d * scale_ * scale_)
    lo = Fraction(s, d * scale_)
    hi = Fraction(s + 1, d * scale_)
    return lo, hi


def root_bounds(x, k: int, bits: int = DEFAULT_PRECISION_BITS) -> tuple[Fraction, Fraction]:
    """Rational bracket of the real ``k``-th root of a nonnegative rational."""
    x = as_rational(x)
    if x < 0 or k < 1:
        raise ValueError("need x >= 0 and k >= 1")
    if k == 1:
        return x, x
    if k == 2:
        return sqrt_bounds(x, bits)
    scale_ = 1 << bits
    target = x * scale_**k
    lo, hi = 0, 1
    while Fraction(hi**k) <= target:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid**k) <= target:
            lo = mid
        else:
            hi = mid
    if Fraction(lo**k) == target:
        return Fraction(lo, scale_), Fraction(lo, scale_)
    return Fraction(lo, scale_), Fraction(hi, scale_)


def to_decimal(x, places: int = 6) -> str:
    """Round half away from zero to a fixed number of places (display only)."""
    x = as_rational(x)
    s = 10**places
    n = abs(x) * s
    r = floor(n + Fraction(1, 2))
    sign = "-" if x < 0 and r != 0 else ""
    whole, part = divmod(r, s)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{part:0{places}d}"


def fmt(x) -> str:
    """Render a rational as ``"p/q"`` (or ``"p"`` when integral)."""
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Sequence, sep: str = " ") -> str:
    return sep.join(fmt(x) for x in v)


class Interval(tuple):
    """Closed interval ``[lo, hi]`` of nonnegative rationals with outward rounding.

    Only what the bound checks need: addition, multiplication, division by a
    positive interval and square roots.
    """

    def __new__(cls, lo, hi=None):
        lo = as_rational(lo)
        hi = lo if hi is None else as_rational(hi)
        if lo > hi:
            raise ValueError("empty interval")
        return super().__new__(cls, (lo, hi))

    lo = property(lambda self: self[0])
    hi = property(lambda self: self[1])

    @classmethod
    def sqrt(cls, x, bits: int = DEFAULT_PRECISION_BITS) -> "Interval":
        if isinstance(x, Interval):
            return cls(sqrt_bounds(x.lo, bits)[0], sqrt_bounds(x.hi, bits)[1])
        return cls(*sqrt_bounds(x, bits))

    @staticmethod
    def _wrap(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval(x)

    def __add__(self, other):
        o = self._wrap(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __mul__(self, other):
        o = self._wrap(other)
        if self.lo < 0 or o.lo < 0:
            raise ValueError("Interval multiplication assumes nonnegative operands")
        return Interval(self.lo * o.lo, self.hi * o.hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        if o.lo <= 0 or self.lo < 0:
            raise ValueError("Interval division assumes a positive divisor")
        return Interval(self.lo / o.hi, self.hi / o.lo)

    def __pow__(self, k: int):
        return Interval(self.lo**k, self.hi**k)

    def certainly_lt(self, other) -> bool:
        return self.hi < self._wrap(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= self._wrap(other).lo

    def __repr__(self):
        return f"Interval({float(self.lo):.12g}, {float(self.hi):.12g})"
