"""Fast invariant checks behind ``padic-spectra selftest``."""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Callable

import numpy as np

from . import mseries, models
from .green import character_sphere_sum, eval_h, h_coefficients
from .operator import RealizationConfig, boundary_residual, find_real_eigenvalues, resolvent_apply
from .padic import character, norm, valuation
from .quadrature import gram_matrix
from .wavelet import WaveletIndex, WaveletSum, to_step_function


def _rationals(rng: random.Random, k: int) -> list[Fraction]:
    return [Fraction(rng.randint(-500, 500), rng.randint(1, 500)) for _ in range(k)]


def check_ultrametric(rng: random.Random) -> bool:
    for p in (2, 3, 5):
        for x, y in zip(_rationals(rng, 200), _rationals(rng, 200)):
            if norm(x * y, p) != norm(x, p) * norm(y, p):
                return False
            if norm(x + y, p) > max(norm(x, p), norm(y, p)):
                return False
            if abs(character(x + y, p) - character(x, p) * character(y, p)) > 1e-12:
                return False
    return True


def check_orthonormality(rng: random.Random) -> bool:
    p = 3
    idx = set()
    while len(idx) < 12:
        N = rng.randint(-2, 2)
        eps = Fraction(rng.randrange(p ** 2), p ** 2) if rng.random() < 0.7 else Fraction(0)
        idx.add(WaveletIndex.make(N, rng.randint(1, p - 1), eps, p))
    G = gram_matrix(to_step_function(WaveletSum.single(i)) for i in sorted(idx))
    return bool(np.max(np.abs(G - np.eye(len(idx)))) <= 1e-12)


def check_green(rng: random.Random) -> bool:
    p, alpha, lam = 2, 2.0, -0.8
    exp = h_coefficients(Fraction(1, 2), lam, alpha, p)
    for x in _rationals(rng, 5):
        radial = eval_h(Fraction(1, 2), lam, x, alpha, p)
        if abs(exp.coefficients(x) - radial.value) > exp.pointwise_tail_bound + radial.error_bound + 1e-12:
            return False
    return True


def check_sphere_sum(rng: random.Random) -> bool:
    return all(abs(character_sphere_sum(x, 0, p) + 1) <= 1e-12
               for p in (2, 3, 5, 7) for x in _rationals(rng, 20) if x != 0)


def check_scaling(rng: random.Random) -> bool:
    p, alpha = 2, 2.0
    for _ in range(10):
        lam = -math.exp(rng.uniform(-5, 5))
        lhs = mseries.eval_M0(p ** alpha * lam, alpha, p)
        rhs = mseries.eval_M0(lam, alpha, p)
        if abs(p ** (alpha - 1) * lhs.value - rhs.value) > 2 * (p ** (alpha - 1) * lhs.error_bound + rhs.error_bound):
            return False
    return True


def check_diff_at_zero(rng: random.Random) -> bool:
    return abs(mseries.eval_diff(0, 0.0, 2.0, 2).value - 0.75) <= 1e-12


def check_friedrichs_law(rng: random.Random) -> bool:
    spec = models.friedrichs_spectrum([0, 1], 2.0, 2, (-2, 2))
    ones = [n for n, _ in spec.type1]
    return ones == [1, 2] and models.recover_gamma_min(spec) == 0


def check_one_point(rng: random.Random) -> bool:
    recs = find_real_eigenvalues(RealizationConfig(2, 2.0, [0], [[-1.0]]), (-1, 1), negative_axis=True)
    tags = [r.interval for r in recs]
    return tags == ["negative-axis", -1, 0, 1]


def check_resolvent(rng: random.Random) -> bool:
    cfg = RealizationConfig(2, 2.0, [0, Fraction(1, 2)], [[1.0, 0.3], [0.3, -0.5]])
    f = WaveletSum(2, {WaveletIndex.make(0, 1, 0, 2): 1.0, WaveletIndex.make(-1, 1, Fraction(1, 2), 2): 0.5j})
    return boundary_residual(cfg, resolvent_apply(cfg, -0.4, f)) <= 1e-8


CHECKS: dict[str, Callable[[random.Random], bool]] = {
    "ultrametric-and-character": check_ultrametric,
    "wavelet-orthonormality": check_orthonormality,
    "green-radial-vs-series": check_green,
    "character-sphere-sum": check_sphere_sum,
    "M0-scaling-identity": check_scaling,
    "diff-at-zero": check_diff_at_zero,
    "friedrichs-two-point-law": check_friedrichs_law,
    "one-point-spectrum": check_one_point,
    "krein-boundary-condition": check_resolvent,
}


def run(seed: int = 0) -> dict[str, bool]:
    results = {}
    for name, fn in CHECKS.items():
        try:
            results[name] = bool(fn(random.Random(seed)))
        except Exception:  # a crash is a failure, not an abort
            results[name] = False
    return results
