"""Green's functions h_{k,lam}: the L2 solutions of (D^alpha - lam) h = delta_{x_k}.

Two independent representations are provided:

* the wavelet expansion, with coefficient
  p^{-N/2} chi(-p^{N-1} j x_k) / (p^{alpha(1-N)} - lam) at eps = {p^N x_k}_p,
  available for alpha > 1/2;
* the radial closed form h(x) = M_{|x - x_k|_p}(lam), available for alpha > 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .mseries import (
    DEFAULT_TOL,
    MEvaluation,
    GUARD_ABS,
    GUARD_REL,
    SpectralGuardError,
    abs_tail,
    default_window,
    eval_M,
    eval_M0_prime,
    nearest_spectral_points,
)
from .padic import as_fraction, character, coset_rep, distance_exponent
from .wavelet import WaveletIndex, WaveletSum


@dataclass(frozen=True)
class Solvability:
    solvable: bool
    reason: str
    radial: bool


def solvable(alpha: float, lam, p: int) -> Solvability:
    """Whether (D^alpha - lam) h = delta has an L2 solution, and whether the radial form applies."""
    if alpha <= 0.5:
        return Solvability(False, "alpha <= 1/2", False)
    if abs(lam) <= GUARD_ABS:
        return Solvability(False, "lambda = 0 (m = -inf)", False)
    for m in nearest_spectral_points(lam, alpha, p):
        pole = float(p) ** (alpha * m)
        if abs(lam - pole) <= GUARD_REL * pole:
            return Solvability(False, f"lambda = p^(alpha*{m})", False)
    return Solvability(True, "ok", alpha > 1)


def _require(alpha: float, lam, p: int, radial: bool = False) -> None:
    s = solvable(alpha, lam, p)
    if not s.solvable:
        if s.reason == "alpha <= 1/2":
            raise ValueError("no L2 solution for alpha <= 1/2")
        raise SpectralGuardError(s.reason)
    if radial and not s.radial:
        raise ValueError("radial formula needs alpha > 1")


def eval_h(x_k, lam, x, alpha: float, p: int, tol: float = DEFAULT_TOL) -> MEvaluation:
    """h_{k,lam}(x) = M_0(lam) at x = x_k, else M_{p^gamma}(lam) with |x - x_k|_p = p^gamma."""
    _require(alpha, lam, p, radial=True)
    return eval_M(distance_exponent(x, x_k, p), lam, alpha, p, tol)


@dataclass(frozen=True)
class GreenExpansion:
    """Windowed wavelet expansion of h_{k,lam} with bounds on what was cut off."""

    coefficients: WaveletSum
    window: tuple[int, int]
    l2_tail_bound: float
    pointwise_tail_bound: float


def default_h_window(lam, alpha: float, p: int, tol: float = DEFAULT_TOL) -> tuple[int, int]:
    """Wavelet window whose pointwise (alpha > 1) or L2 tail is below tol.

    The wavelet scale N pairs with M-series index 1 - N.
    """
    power = 1 if alpha > 1 else 2
    L, K = default_window(lam, alpha, p, tol * p / (p - 1), power)
    return 1 - K, 1 - L


def h_coefficients(x_k, lam, alpha: float, p: int, N_range: tuple[int, int] | None = None,
                   tol: float = DEFAULT_TOL) -> GreenExpansion:
    _require(alpha, lam, p)
    if N_range is None:
        N_range = default_h_window(lam, alpha, p, tol)
    n_min, n_max = N_range
    if n_min > n_max:
        raise ValueError(f"empty N range {N_range}")
    x_k = as_fraction(x_k)
    coeffs = {}
    for N in range(n_min, n_max + 1):
        eps = coset_rep(N, x_k, p)
        denom = float(p) ** (alpha * (1 - N)) - lam
        for j in range(1, p):
            chi = character(-Fraction(p) ** (N - 1) * j * x_k, p)
            coeffs[WaveletIndex(N, j, eps)] = float(p) ** (-N / 2) * chi / denom
    # tails in M-series indexing: N' = 1 - N
    scale = (p - 1) / p
    lo, hi = 1 - n_max, 1 - n_min
    l2 = scale * abs_tail(lam, alpha, p, lo, hi, power=2)
    pointwise = scale * abs_tail(lam, alpha, p, lo, hi, power=1) if alpha > 1 else math.inf
    return GreenExpansion(WaveletSum(p, coeffs), (n_min, n_max), math.sqrt(l2), pointwise)


def h_norm_sq(lam, alpha: float, p: int, tol: float = DEFAULT_TOL) -> MEvaluation:
    """||h_{k,lam}||^2, independent of the centre.

    Equals M_0'(lam) for real lam and Im M_0(lam) / Im lam otherwise.
    """
    _require(alpha, lam, p, radial=True)
    im = complex(lam).imag
    if im == 0:
        return eval_M0_prime(complex(lam).real, alpha, p, tol)
    ev = eval_M(-math.inf, lam, alpha, p, tol)
    return MEvaluation(complex(ev.value).imag / im, ev.error_bound / abs(im), ev.terms_used)


def character_sphere_sum(x, x_k, p: int) -> complex:
    """sum_{j=1}^{p-1} chi(p^{gamma-1} j (x - x_k)) on the sphere |x - x_k|_p = p^gamma.

    Always -1 up to rounding.
    """
    x, x_k = as_fraction(x), as_fraction(x_k)
    if x == x_k:
        raise ValueError("x must differ from x_k")
    gamma = distance_exponent(x, x_k, p)
    y = Fraction(p) ** (gamma - 1) * (x - x_k)
    return complex(math.fsum(character(j * y, p).real for j in range(1, p)),
                   math.fsum(character(j * y, p).imag for j in range(1, p)))


@dataclass(frozen=True)
class GreenComponent:
    center: Fraction
    lam: complex
    weight: complex


@dataclass(frozen=True)
class DomainElement:
    """f = u + sum_k c_k h_{k,-1}, with u given by a finite wavelet sum."""

    smooth_part: WaveletSum
    green_parts: tuple[GreenComponent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        centers = [g.center for g in self.green_parts]
        if len(set(centers)) != len(centers):
            raise ValueError("green centres must be pairwise distinct")
