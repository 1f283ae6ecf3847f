"""The M-functions M_0, M_{p^gamma}, their derivatives and the difference M_0 - M_{p^gamma}.

    M_0(lam)        = (p-1)/p  sum_{N in Z}      p^N / (p^{alpha N} - lam)
    M_{p^g}(lam)    = (p-1)/p  sum_{N <= -g}     p^N / (p^{alpha N} - lam)
                      - p^{-g} / (p^{alpha(1-g)} - lam)

Every evaluation returns an :class:`MEvaluation` whose ``error_bound``
covers both the discarded tails and floating-point rounding.  The tails
are bounded with the two elementary estimates

* ``p^{alpha N} >= 2|lam|``  =>  ``|p^{alpha N} - lam| >= p^{alpha N} / 2``
* ``p^{alpha N} <= |lam|/2`` =>  ``|p^{alpha N} - lam| >= |lam| / 2``

which hold for complex ``lam`` as well, followed by geometric sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .padic import is_prime

EPS = np.finfo(float).eps
Number = Union[float, complex]

DEFAULT_TOL = 1e-12
GUARD_REL = 1e-9
GUARD_ABS = 1e-12
MAX_TERMS = 200_000


class SpectralGuardError(ValueError):
    """lambda is too close to a point of sigma(D^alpha) or to 0 to evaluate safely."""


@dataclass(frozen=True)
class MEvaluation:
    value: Number
    error_bound: float
    terms_used: int

    def __float__(self) -> float:
        return float(np.real(self.value))

    def __complex__(self) -> complex:
        return complex(self.value)


def _check_args(alpha: float, p: int) -> None:
    if not alpha > 1:
        raise ValueError(f"M-series need alpha > 1, got {alpha}")
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")


def nearest_spectral_points(lam: Number, alpha: float, p: int) -> list[int]:
    """Exponents m whose p^{alpha m} are candidates for the nearest spectral point."""
    mag = abs(lam)
    if mag == 0:
        return []
    m = round(math.log(mag) / (alpha * math.log(p)))
    return [m - 1, m, m + 1]


def check_guard(lam: Number, alpha: float, p: int, *, rel: float = GUARD_REL,
                abs_tol: float = GUARD_ABS, allow_zero: bool = False,
                min_pole: int | None = None) -> None:
    """Refuse lam within ``rel`` (relative) of some p^{alpha m} or within ``abs_tol`` of 0.

    ``min_pole`` restricts the poles checked to m >= min_pole (used by the
    difference series, whose only poles are p^{alpha N}, N >= 1 - gamma).
    """
    if not allow_zero and abs(lam) <= abs_tol:
        raise SpectralGuardError(f"lambda={lam} is within {abs_tol} of 0")
    for m in nearest_spectral_points(lam, alpha, p):
        if min_pole is not None and m < min_pole:
            continue
        pole = float(p) ** (alpha * m)
        if abs(lam - pole) <= rel * pole:
            raise SpectralGuardError(
                f"lambda={lam} is within relative {rel} of p^(alpha*{m})={pole}")


def _log_p(x: float, p: int) -> float:
    return math.log(x) / math.log(p)


def _upper_cut(lam_abs: float, alpha: float, p: int, power: int, tol: float) -> int:
    """Last explicitly summed N so that the N > K tail is below tol."""
    k = power * alpha - 1.0
    ratio = p ** (1.0 - power * alpha)
    # tail = 2^power p^{(K+1)(1 - power alpha)} / (1 - ratio) <= tol
    need = _log_p(2.0**power / (tol * (1.0 - ratio)), p)
    K = math.ceil(need / k)  # one term of margin over ceil(need/k) - 1
    if lam_abs > 0:
        K = max(K, math.ceil(_log_p(2.0 * lam_abs, p) / alpha) + 1)
    return K


def _upper_tail(K: int, alpha: float, p: int, power: int) -> float:
    ratio = p ** (1.0 - power * alpha)
    return 2.0**power * float(p) ** ((K + 1) * (1.0 - power * alpha)) / (1.0 - ratio)


def _lower_cut(lam_abs: float, alpha: float, p: int, power: int, tol: float) -> int:
    """First explicitly summed N so that the N < L tail is below tol."""
    # need p^{alpha(L-1)} <= |lam|/2 and 2^power p^L / ((p-1)|lam|^power) <= tol
    L1 = math.floor(_log_p(lam_abs / 2.0, p) / alpha)  # one term of margin
    L2 = math.floor(_log_p(tol * (p - 1) * lam_abs**power / 2.0**power, p)) - 1
    return min(L1, L2)


def _lower_tail(L: int, lam_abs: float, p: int, power: int) -> float:
    return 2.0**power * float(p) ** L / ((p - 1) * lam_abs**power)


def _terms(N: np.ndarray, lam: Number, alpha: float, p: int, power: int):
    """p^N / (p^{alpha N} - lam)^power and a per-term relative rounding factor."""
    cplx = isinstance(lam, complex)
    dtype = complex if cplx else float
    out = np.empty(N.shape, dtype=dtype)
    cond = np.empty(N.shape, dtype=float)
    Nf = N.astype(float)
    neg = N < 0
    if neg.any():
        pa = float(p) ** (alpha * Nf[neg])
        den = pa - lam
        out[neg] = float(p) ** Nf[neg] / den**power
        cond[neg] = (pa + abs(lam)) / np.abs(den)
    pos = ~neg
    if pos.any():
        scaled = float(p) ** (-alpha * Nf[pos])
        den = 1.0 - lam * scaled
        out[pos] = float(p) ** (Nf[pos] * (1.0 - power * alpha)) / den**power
        cond[pos] = (1.0 + abs(lam) * scaled) / np.abs(den)
    return out, cond


def _fsum(values: np.ndarray) -> Number:
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def series(lam: Number, alpha: float, p: int, n_lo: int | None, n_hi: int | None,
           power: int = 1, tol: float = DEFAULT_TOL) -> MEvaluation:
    """sum_{N=n_lo}^{n_hi} p^N / (p^{alpha N} - lam)^power with a rigorous bound.

    ``None`` for either end means an infinite tail.  No guard is applied here.
    """
    lam_abs = abs(lam)
    tail = 0.0
    if n_lo is None:
        if lam_abs == 0:
            raise SpectralGuardError("lower tail diverges at lambda = 0")
        L = _lower_cut(lam_abs, alpha, p, power, tol / 2)
        if n_hi is not None:
            L = min(L, n_hi + 1)
        tail += _lower_tail(L, lam_abs, p, power)
    else:
        L = n_lo
    if n_hi is None:
        K = max(_upper_cut(lam_abs, alpha, p, power, tol / 2), L - 1)
        tail += _upper_tail(K, alpha, p, power)
    else:
        K = n_hi
    if K - L + 1 > MAX_TERMS:
        raise ValueError(f"series would need {K - L + 1} terms; relax tol or alpha")
    N = np.arange(L, K + 1)
    terms, cond = _terms(N, lam, alpha, p, power)
    value = _fsum(terms)
    rounding = EPS * (float(np.sum(np.abs(terms) * (power * cond + 4.0))) + abs(value))
    return MEvaluation(value, float(tail + rounding), len(N))


def _prefactor(p: int) -> float:
    return (p - 1) / p


def _combine(main: MEvaluation, scale: float, extra: Number = 0.0,
             extra_cond: float = 0.0) -> MEvaluation:
    value = scale * main.value + extra
    bound = scale * main.error_bound + EPS * abs(extra) * (extra_cond + 4.0) + EPS * abs(value)
    return MEvaluation(value, float(bound), main.terms_used + (1 if extra_cond else 0))


def eval_M0(lam: Number, alpha: float, p: int, tol: float = DEFAULT_TOL) -> MEvaluation:
    _check_args(alpha, p)
    check_guard(lam, alpha, p)
    return _combine(series(lam, alpha, p, None, None, 1, tol / _prefactor(p)), _prefactor(p))


def eval_M0_prime(lam: Number, alpha: float, p: int, tol: float = DEFAULT_TOL) -> MEvaluation:
    """Termwise derivative (p-1)/p sum p^N / (p^{alpha N} - lam)^2."""
    _check_args(alpha, p)
    check_guard(lam, alpha, p)
    return _combine(series(lam, alpha, p, None, None, 2, tol / _prefactor(p)), _prefactor(p))


def _edge_term(gamma: int, lam: Number, alpha: float, p: int, power: int, weight: float):
    pole = float(p) ** (alpha * (1 - gamma))
    den = pole - lam
    return weight / den**power, (pole + abs(lam)) / abs(den)


def eval_Mgamma(gamma: int, lam: Number, alpha: float, p: int, tol: float = DEFAULT_TOL,
                form: str = "direct") -> MEvaluation:
    """M_{p^gamma}(lam).  ``form="telescoped"`` sums the positive-form series instead.

    The telescoped series is
    sum_{N <= -gamma} p^N (p^{alpha(N+1)} - p^{alpha N}) / ((p^{alpha N} - lam)(p^{alpha(N+1)} - lam)).
    """
    _check_args(alpha, p)
    check_guard(lam, alpha, p)
    if form == "telescoped":
        return _telescoped(gamma, lam, alpha, p, tol)
    if form != "direct":
        raise ValueError(f"unknown form {form!r}")
    main = series(lam, alpha, p, None, -gamma, 1, tol / _prefactor(p))
    extra, cond = _edge_term(gamma, lam, alpha, p, 1, -float(p) ** (-gamma))
    return _combine(main, _prefactor(p), extra, cond)


def eval_Mgamma_prime(gamma: int, lam: Number, alpha: float, p: int,
                      tol: float = DEFAULT_TOL) -> MEvaluation:
    _check_args(alpha, p)
    check_guard(lam, alpha, p)
    main = series(lam, alpha, p, None, -gamma, 2, tol / _prefactor(p))
    extra, cond = _edge_term(gamma, lam, alpha, p, 2, -float(p) ** (-gamma))
    return _combine(main, _prefactor(p), extra, 2 * cond)


def _telescoped(gamma: int, lam: Number, alpha: float, p: int, tol: float) -> MEvaluation:
    lam_abs = abs(lam)
    # tail N < L with p^{alpha(L)} <= |lam|/2: |term| <= 4 p^alpha p^{N(1+alpha)} / |lam|^2
    top = -gamma
    L = min(top + 1, math.floor(_log_p(lam_abs / 2.0, p) / alpha))
    q = float(p) ** (1.0 + alpha)

    def tail(L):
        return 4.0 * float(p) ** alpha * float(p) ** (L * (1.0 + alpha)) / ((q - 1.0) * lam_abs**2)

    while tail(L) > tol / 2:
        L -= 1
    N = np.arange(L, top + 1).astype(float)
    a = float(p) ** (alpha * N)
    b = float(p) ** (alpha * (N + 1))
    terms = float(p) ** N * (b - a) / ((a - lam) * (b - lam))
    value = _fsum(terms)
    cond = (a + lam_abs) / np.abs(a - lam) + (b + lam_abs) / np.abs(b - lam)
    rounding = EPS * (float(np.sum(np.abs(terms) * (cond + 6.0))) + abs(value))
    return MEvaluation(value, float(tail(L) + rounding), len(N))


def eval_diff(gamma: int, lam: Number, alpha: float, p: int, tol: float = DEFAULT_TOL) -> MEvaluation:
    """M_0 - M_{p^gamma} through its one-sided series; finite at lam = 0.

    (p-1)/p sum_{N >= 2-gamma} p^N/(p^{alpha N} - lam) + p^{1-gamma}/(p^{alpha(1-gamma)} - lam)
    """
    _check_args(alpha, p)
    check_guard(lam, alpha, p, allow_zero=True, min_pole=1 - gamma)
    main = series(lam, alpha, p, 2 - gamma, None, 1, tol / _prefactor(p))
    extra, cond = _edge_term(gamma, lam, alpha, p, 1, float(p) ** (1 - gamma))
    return _combine(main, _prefactor(p), extra, cond)


def eval_M(gamma: int | float, lam: Number, alpha: float, p: int,
           tol: float = DEFAULT_TOL) -> MEvaluation:
    """M_{p^gamma}, with gamma = -inf meaning M_0 (distance zero)."""
    if gamma == -math.inf:
        return eval_M0(lam, alpha, p, tol)
    return eval_Mgamma(int(gamma), lam, alpha, p, tol)


def eval_M_prime(gamma: int | float, lam: Number, alpha: float, p: int,
                 tol: float = DEFAULT_TOL) -> MEvaluation:
    if gamma == -math.inf:
        return eval_M0_prime(lam, alpha, p, tol)
    return eval_Mgamma_prime(int(gamma), lam, alpha, p, tol)


def diff_closed_form_claim(gamma: int, alpha: float, p: int) -> float:
    """The closed form p^{(1-alpha)(1-gamma)} sometimes quoted for (M_0 - M_{p^gamma})(0).

    It drops the tail sum; :func:`eval_diff` at 0 is the correct value.
    """
    return float(p) ** ((1 - alpha) * (1 - gamma))


def diff_at_zero_exact(gamma: int, alpha: float, p: int) -> float:
    """Closed form of eval_diff(gamma, 0): both pieces are geometric at lam = 0."""
    r = float(p) ** (1 - alpha)
    return r ** (1 - gamma) * (1 + (p - 1) * r / (p * (1 - r)))


def abs_tail(lam: Number, alpha: float, p: int, lo: int, hi: int, power: int = 1) -> float:
    """Rigorous bound on sum_{N not in [lo, hi]} p^N / |p^{alpha N} - lam|^power.

    Terms outside the window are added explicitly until one of the two
    geometric estimates applies.  Diverges (returns inf) when
    power * alpha <= 1 or, for the lower tail, at lam = 0.
    """
    if power * alpha <= 1:
        return math.inf
    lam_abs = abs(lam)
    total = 0.0
    N = hi + 1
    while float(p) ** (alpha * N) < 2.0 * lam_abs:
        den = abs(float(p) ** (alpha * N) - lam)
        if den == 0:
            return math.inf
        total += float(p) ** N / den**power
        N += 1
    total += _upper_tail(N - 1, alpha, p, power)
    N = lo - 1
    if lam_abs == 0:
        return math.inf
    while float(p) ** (alpha * N) > lam_abs / 2.0:
        den = abs(float(p) ** (alpha * N) - lam)
        if den == 0:
            return math.inf
        total += float(p) ** N / den**power
        N -= 1
    total += 2.0**power * float(p) ** (N + 1) / ((p - 1) * lam_abs**power)
    return total * (1.0 + 64 * EPS)


def default_window(lam: Number, alpha: float, p: int, tol: float = DEFAULT_TOL,
                   power: int = 1) -> tuple[int, int]:
    """Smallest M-series index range [L, K] whose outside tail is below tol."""
    lam_abs = abs(lam)
    L = _lower_cut(lam_abs, alpha, p, power, tol / 2)
    K = max(_upper_cut(lam_abs, alpha, p, power, tol / 2), L)
    return L, K
