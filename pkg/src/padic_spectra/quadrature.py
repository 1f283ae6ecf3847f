"""Haar-measure integration of modulated ball indicators.

The class of functions ``c * chi_p(a x) * 1_{B_r(center)}(x)`` is closed
under products, conjugation and the Fourier transform, and every integral
over it has a closed form::

    int_{B_r(c)} chi_p(a x) d_p x = chi_p(a c) p^r  if |a|_p <= p^{-r}, else 0

so inner products of finite wavelet combinations need no numerical
quadrature at all.  :func:`coset_sum_integral` is the brute-force
cross-check: it splits each ball into cosets on which the integrand is
constant and adds them up.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .padic import as_fraction, character, distance_exponent, valuation


@dataclass(frozen=True)
class ModulatedIndicator:
    """``coefficient * chi_p(modulation * x)`` on the ball |x - center|_p <= p^radius."""

    coefficient: complex
    modulation: Fraction
    center: Fraction
    radius: int

    def contains(self, x: Fraction, p: int) -> bool:
        return distance_exponent(x, self.center, p) <= self.radius

    def __call__(self, x, p: int) -> complex:
        x = as_fraction(x)
        if not self.contains(x, p):
            return 0j
        return self.coefficient * character(self.modulation * x, p)


@dataclass(frozen=True)
class StepFunction:
    """Finite sum of modulated indicators; locally constant with compact support."""

    p: int
    terms: tuple[ModulatedIndicator, ...] = ()

    @classmethod
    def indicator(cls, p: int, radius: int = 0, center=0, coefficient=1.0) -> "StepFunction":
        return cls(p, (ModulatedIndicator(complex(coefficient), Fraction(0),
                                          as_fraction(center), radius),))

    def __call__(self, x) -> complex:
        x = as_fraction(x)
        return sum((t(x, self.p) for t in self.terms), 0j)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        _check_prime(self, other)
        return StepFunction(self.p, self.terms + other.terms)

    def __neg__(self) -> "StepFunction":
        return self.scale(-1.0)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-other)

    def scale(self, c: complex) -> "StepFunction":
        return StepFunction(self.p, tuple(
            ModulatedIndicator(c * t.coefficient, t.modulation, t.center, t.radius)
            for t in self.terms))

    def conjugate(self) -> "StepFunction":
        return StepFunction(self.p, tuple(
            ModulatedIndicator(t.coefficient.conjugate(), -t.modulation, t.center, t.radius)
            for t in self.terms))

    def reflect(self) -> "StepFunction":
        """x -> f(-x)."""
        return StepFunction(self.p, tuple(
            ModulatedIndicator(t.coefficient, -t.modulation, -t.center, t.radius)
            for t in self.terms))

    def __mul__(self, other: "StepFunction") -> "StepFunction":
        _check_prime(self, other)
        out = []
        for s, t in itertools.product(self.terms, other.terms):
            prod = _term_product(s, t, self.p)
            if prod is not None:
                out.append(prod)
        return StepFunction(self.p, tuple(out))


def _check_prime(f: StepFunction, g: StepFunction) -> None:
    if f.p != g.p:
        raise ValueError(f"step functions over different primes ({f.p} vs {g.p})")


def _term_product(s: ModulatedIndicator, t: ModulatedIndicator, p: int):
    # balls are nested or disjoint
    if distance_exponent(s.center, t.center, p) > max(s.radius, t.radius):
        return None
    small = s if s.radius <= t.radius else t
    return ModulatedIndicator(s.coefficient * t.coefficient,
                              s.modulation + t.modulation, small.center, small.radius)


def integrate_term(t: ModulatedIndicator, p: int) -> complex:
    if t.modulation != 0 and -valuation(t.modulation, p) > -t.radius:
        return 0j
    return t.coefficient * character(t.modulation * t.center, p) * float(p) ** t.radius


def integrate(f: StepFunction) -> complex:
    """Haar integral of f, normalised so the unit ball has measure 1."""
    return sum((integrate_term(t, f.p) for t in f.terms), 0j)


def inner_product(f: StepFunction, g: StepFunction) -> complex:
    """L2 pairing (f, g) = int f conj(g)."""
    return integrate(f * g.conjugate())


def pairing(f: StepFunction, g: StepFunction) -> complex:
    """Bilinear pairing int f g (no conjugation), as for <delta, u>."""
    return integrate(f * g)


def fourier(f: StepFunction) -> StepFunction:
    """F[f](xi) = int chi_p(xi x) f(x) d_p x, exactly, in the same class.

    chi(a x) 1_{B_r(c)}  ->  p^r chi(a c) chi(c xi) 1_{B_{-r}(-a)}(xi).
    """
    p = f.p
    return StepFunction(p, tuple(
        ModulatedIndicator(t.coefficient * character(t.modulation * t.center, p) * float(p) ** t.radius,
                           t.center, -t.modulation, -t.radius)
        for t in f.terms))


def split_ball(center: Fraction, radius: int, p: int) -> list[tuple[Fraction, int]]:
    """The p child balls of radius p^(radius-1) covering B_radius(center)."""
    step = Fraction(p) ** (-radius)
    return [(center + k * step, radius - 1) for k in range(p)]


def constancy_radius(f: StepFunction) -> int:
    """A radius r such that every term is constant on balls of radius p^r."""
    r = min(t.radius for t in f.terms)
    for t in f.terms:
        if t.modulation != 0:
            r = min(r, valuation(t.modulation, f.p))
    return r


def coset_sum_integral(f: StepFunction, max_cells: int = 200_000) -> complex:
    """Brute-force integral: enumerate cosets on which f is constant.

    Independent of the closed form in :func:`integrate_term`; used as a
    test oracle on small supports.
    """
    if not f.terms:
        return 0j
    p = f.p
    fine = constancy_radius(f)
    # disjoint maximal balls covering the support
    roots: list[tuple[Fraction, int]] = []
    for t in sorted(f.terms, key=lambda t: -t.radius):
        if not any(distance_exponent(t.center, c, p) <= r for c, r in roots):
            roots.append((t.center, t.radius))
    total = 0j
    cells = 0
    for center, radius in roots:
        depth = radius - fine
        cells += p**depth
        if cells > max_cells:
            raise ValueError("too many cosets for brute-force integration")
        step = Fraction(p) ** (-radius)
        for ks in itertools.product(range(p), repeat=depth):
            x = center + sum((k * step * Fraction(p) ** i for i, k in enumerate(ks)), Fraction(0))
            total += f(x)
    return total * float(p) ** fine


def gram_matrix(fs: Iterable[StepFunction]) -> np.ndarray:
    fs = list(fs)
    G = np.empty((len(fs), len(fs)), dtype=complex)
    for i, f in enumerate(fs):
        for j, g in enumerate(fs):
            G[i, j] = inner_product(f, g)
    return G

