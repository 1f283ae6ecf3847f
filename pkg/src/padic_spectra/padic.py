"""Exact arithmetic on Q_p elements represented as rationals.

Every quantity needed downstream (valuation, norm, fractional part,
additive character, coset representatives of Q_p/Z_p) is exactly
computable on rationals, so there is no digit-precision policy here.
The only floating step is the complex exponential in :func:`character`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

INF = math.inf

RationalLike = Union[int, Fraction, str, "PAdicRational"]


class ContextMismatchError(ValueError):
    """Two p-adic values built over different primes were combined."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for all n < 3.3e24)."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeContext:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be a prime integer, got {self.p!r}")


def as_fraction(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions, ``"a/b"`` strings and PAdicRational to Fraction."""
    if isinstance(x, PAdicRational):
        return x.value
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational literal {x!r}") from exc
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: RationalLike, p: int) -> float | int:
    """Exponent gamma with x = p^gamma * m/n, p not dividing m, n; +inf for 0."""
    x = as_fraction(x)
    if x == 0:
        return INF
    return _int_valuation(abs(x.numerator), p) - _int_valuation(x.denominator, p)


def norm(x: RationalLike, p: int) -> Fraction:
    """|x|_p as an exact rational."""
    v = valuation(x, p)
    if v == INF:
        return Fraction(0)
    return Fraction(p) ** (-v)


def valuation_and_norm(x: RationalLike, p: int) -> tuple[float | int, Fraction]:
    return valuation(x, p), norm(x, p)


def fractional_part(x: RationalLike, p: int) -> Fraction:
    """The p-adic fractional part {x}_p, a rational in [0, 1).

    For gamma(x) = -k < 0 this is a / p^k with a the residue of
    numerator * denominator^{-1} modulo p^k.
    """
    x = as_fraction(x)
    v = valuation(x, p)
    if v == INF or v >= 0:
        return Fraction(0)
    k = -v
    pk = p**k
    unit_den = x.denominator // pk
    a = (x.numerator * pow(unit_den, -1, pk)) % pk
    return Fraction(a, pk)


def character(x: RationalLike, p: int) -> complex:
    """Additive character chi_p(x) = exp(2 pi i {x}_p)."""
    frac = fractional_part(x, p)
    if frac == 0:
        return 1.0 + 0.0j
    # reduce the phase to (-1/2, 1/2] so exact values like -1 come out clean
    if frac > Fraction(1, 2):
        frac -= 1
    if frac == Fraction(1, 2):
        return -1.0 + 0.0j
    return cmath.exp(2j * math.pi * float(frac))


def distance_exponent(x: RationalLike, y: RationalLike, p: int) -> float | int:
    """gamma with |x - y|_p = p^gamma; -inf when x == y.

    Note the sign: this is minus the valuation of x - y.
    """
    diff = as_fraction(x) - as_fraction(y)
    if diff == 0:
        return -INF
    return -valuation(diff, p)


def digits(x: RationalLike, p: int, count: int) -> tuple[int | float, list[int]]:
    """First ``count`` digits of the canonical presentation x = p^gamma sum x^i p^i.

    Returns (gamma, [x^0, x^1, ...]).  Debug/display helper.
    """
    x = as_fraction(x)
    v = valuation(x, p)
    if v == INF:
        return v, [0] * count
    unit = x / Fraction(p) ** v
    pk = p**count
    residue = (unit.numerator * pow(unit.denominator, -1, pk)) % pk
    out = []
    for _ in range(count):
        residue, d = divmod(residue, p)
        out.append(d)
    return v, out


@dataclass(frozen=True, order=True)
class CosetEpsilon:
    """An element of Q_p/Z_p stored by its digits eps_1..eps_m.

    ``digits[i-1]`` is the coefficient of p^{-i}; the empty tuple is zero.
    """

    digits: tuple[int, ...] = ()
    p: int = 2

    def __post_init__(self):
        if any(not 0 <= d < self.p for d in self.digits):
            raise ValueError(f"digits must lie in 0..{self.p - 1}: {self.digits}")
        if self.digits and self.digits[-1] == 0:
            raise ValueError("non-canonical coset digits (trailing zero)")

    @classmethod
    def from_fraction(cls, eps: Fraction, p: int) -> "CosetEpsilon":
        eps = fractional_part(eps, p)
        if eps == 0:
            return cls((), p)
        k = -valuation(eps, p)
        a = eps.numerator * (p**k // eps.denominator)
        ds = []
        for _ in range(k):
            a, d = divmod(a, p)
            ds.append(d)
        return cls(tuple(reversed(ds)), p)

    @property
    def value(self) -> Fraction:
        return sum((Fraction(d, self.p ** (i + 1)) for i, d in enumerate(self.digits)),
                   Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.digits)


def coset_rep(N: int, x: RationalLike, p: int) -> CosetEpsilon:
    """The coset eps = {p^N x}_p as canonical digits."""
    return CosetEpsilon.from_fraction(Fraction(p) ** N * as_fraction(x), p)


@total_ordering
@dataclass(frozen=True)
class PAdicRational:
    """A rational number viewed inside Q_p for a fixed prime."""

    value: Fraction
    context: PrimeContext

    def __init__(self, value: RationalLike, p: int | PrimeContext):
        ctx = p if isinstance(p, PrimeContext) else PrimeContext(p)
        object.__setattr__(self, "value", as_fraction(value))
        object.__setattr__(self, "context", ctx)

    @property
    def p(self) -> int:
        return self.context.p

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def _other(self, other) -> Fraction:
        if isinstance(other, PAdicRational):
            if other.p != self.p:
                raise ContextMismatchError(f"p={self.p} vs p={other.p}")
            return other.value
        return as_fraction(other)

    def __add__(self, other):
        return PAdicRational(self.value + self._other(other), self.context)

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicRational(self.value - self._other(other), self.context)

    def __rsub__(self, other):
        return PAdicRational(self._other(other) - self.value, self.context)

    def __mul__(self, other):
        return PAdicRational(self.value * self._other(other), self.context)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PAdicRational(self.value / self._other(other), self.context)

    def __neg__(self):
        return PAdicRational(-self.value, self.context)

    def __eq__(self, other):
        if isinstance(other, PAdicRational):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other):
        # ordering of the underlying rationals; only used for stable sorting
        return self.value < self._other(other)

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"PAdicRational({str(self.value)!r}, p={self.p})"

    def valuation(self):
        return valuation(self.value, self.p)

    def norm(self) -> Fraction:
        return norm(self.value, self.p)

    def fractional_part(self) -> Fraction:
        return fractional_part(self.value, self.p)

    def character(self) -> complex:
        return character(self.value, self.p)

    def distance_exponent(self, other: "PAdicRational"):
        return distance_exponent(self.value, self._other(other), self.p)

    def digits(self, count: int):
        return digits(self.value, self.p, count)
