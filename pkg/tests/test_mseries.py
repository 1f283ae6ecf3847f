import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_spectra import mseries as ms
from padic_spectra.mseries import SpectralGuardError

import oracles
from oracles import m_sum


def test_pinned_values_against_exact_sums():
    cases = [
        (ms.eval_M0(-1.0, 2.0, 2), oracles.M0_P2_A2_LAM_M1),
        (ms.eval_Mgamma(0, -1.0, 2.0, 2), oracles.MG0_P2_A2_LAM_M1),
        (ms.eval_Mgamma(0, -1.0, 2.0, 2, form="telescoped"), oracles.MG0_P2_A2_LAM_M1),
        (ms.eval_M0_prime(-1.0, 2.0, 2), oracles.M0P_P2_A2_LAM_M1),
        (ms.eval_diff(0, 0.0, 2.0, 2), oracles.DIFF0_P2_A2_LAM_0),
        (ms.eval_M0(-1.0, 3.0, 3), oracles.M0_P3_A3_LAM_M1),
        (ms.eval_Mgamma(1, -2.5, 3.0, 3), oracles.MG1_P3_A3_LAM_M5_2),
    ]
    for ev, want in cases:
        assert ev.error_bound <= 1e-12
        assert abs(ev.value - want) <= ev.error_bound + 1e-16


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(-50), max_value=Fraction(-1, 50), max_denominator=100))
def test_m0_brute_force_on_negative_axis(lam):
    # p = 2, alpha = 2: terms with |N| > 60 add less than 2^-58 / |lam|
    exact = float(m_sum(lam, 2, 2, -60, 60))
    ev = ms.eval_M0(float(lam), 2.0, 2)
    assert abs(ev.value - exact) <= ev.error_bound + 2.0**-58 / float(-lam)


@pytest.mark.parametrize("gamma", [-2, 0, 3])
def test_mgamma_brute_force_positive_lambda(gamma):
    lam = Fraction(7, 3)  # inside (p^0, p^2) for p = 2, alpha = 2
    exact = m_sum(lam, 2, 2, -60, -gamma) - Fraction(2) ** (-gamma) / (Fraction(4) ** (1 - gamma) - lam)
    ev = ms.eval_Mgamma(gamma, 7 / 3, 2.0, 2)
    assert abs(ev.value - float(exact)) <= ev.error_bound + 1e-16


def test_scaling_identity():
    rng = random.Random(0)
    p, alpha = 3, 1.5
    for _ in range(40):
        lam = rng.choice([-1, 1]) * math.exp(rng.uniform(-6, 6))
        try:
            a = ms.eval_M0(p**alpha * lam, alpha, p)
            b = ms.eval_M0(lam, alpha, p)
        except SpectralGuardError:
            continue
        assert abs(p ** (alpha - 1) * a.value - b.value) <= 2 * (p ** (alpha - 1) * a.error_bound + b.error_bound)


def test_m0_monotone_on_negative_axis_with_range_zero_to_infinity():
    xs = -np.exp(np.linspace(20, -20, 80))
    vals = [ms.eval_M0(float(x), 2.0, 2).value for x in xs]
    assert all(b > a > 0 for a, b in zip(vals, vals[1:]))
    assert vals[0] < 1e-3 and vals[-1] > 10


def test_mgamma_decreasing_beyond_its_edge_pole():
    gamma, p, alpha = 0, 2, 2.0
    edge = p ** (alpha * (1 - gamma))
    lams = [edge * (1 + t) for t in np.geomspace(1e-6, 1e3, 50)]
    vals = []
    for lam in lams:
        try:
            vals.append(ms.eval_Mgamma(gamma, lam, alpha, p).value)
        except SpectralGuardError:
            pass
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_diff_increasing_below_its_first_pole():
    gamma, p, alpha = 1, 3, 2.0
    top = p ** (alpha * (1 - gamma))
    lams = np.concatenate([-np.geomspace(1e4, 1e-4, 30), [0.0], top * (1 - np.geomspace(0.9, 1e-6, 30))])
    vals = [ms.eval_diff(gamma, float(x), alpha, p).value for x in lams]
    assert all(b > a > 0 for a, b in zip(vals, vals[1:]))


def test_derivative_matches_finite_difference():
    for lam in (-3.0, -0.2, 0.6, 2.5, 40.0):
        h = 1e-6
        fd = (ms.eval_M0(lam + h, 2.0, 2).value - ms.eval_M0(lam - h, 2.0, 2).value) / (2 * h)
        d = ms.eval_M0_prime(lam, 2.0, 2).value
        assert d > 0
        assert abs(fd - d) <= 1e-6 * max(1.0, abs(d))


def test_mgamma_derivative_matches_finite_difference():
    for gamma in (-1, 0, 2):
        lam, h = -0.7, 1e-6
        fd = (ms.eval_Mgamma(gamma, lam + h, 2.0, 3).value
              - ms.eval_Mgamma(gamma, lam - h, 2.0, 3).value) / (2 * h)
        assert abs(fd - ms.eval_Mgamma_prime(gamma, lam, 2.0, 3).value) <= 1e-6


def test_diff_consistent_with_two_series():
    for gamma, lam in [(0, -1.0), (2, 0.3), (-1, 5.0), (1, 0.5 + 0.2j)]:
        d = ms.eval_diff(gamma, lam, 2.0, 2)
        a, b = ms.eval_M0(lam, 2.0, 2), ms.eval_Mgamma(gamma, lam, 2.0, 2)
        assert abs(d.value - (a.value - b.value)) <= d.error_bound + a.error_bound + b.error_bound


def test_diff_at_zero_against_closed_forms():
    for p, alpha, gamma in [(2, 2.0, 0), (3, 1.5, 2), (5, 3.0, -1)]:
        ev = ms.eval_diff(gamma, 0.0, alpha, p)
        assert abs(ev.value - ms.diff_at_zero_exact(gamma, alpha, p)) <= ev.error_bound + 1e-15
    assert ms.diff_closed_form_claim(0, 2.0, 2) == 0.5


def test_pole_growth_before_guard():
    pole = 2.0**2
    for side in (-1, 1):
        vals = [abs(ms.eval_M0(pole * (1 + side * d), 2.0, 2).value) for d in (1e-2, 1e-4, 1e-6, 1e-8)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 1e7


def test_guards():
    with pytest.raises(SpectralGuardError):
        ms.eval_M0(4.0 * (1 + 1e-10), 2.0, 2)
    with pytest.raises(SpectralGuardError):
        ms.eval_M0(1e-13, 2.0, 2)
    with pytest.raises(SpectralGuardError):
        ms.eval_diff(0, 4.0, 2.0, 2)
    ms.eval_diff(0, 1.0, 2.0, 2)  # p^0 is not a pole of the difference for gamma = 0
    with pytest.raises(ValueError):
        ms.eval_M0(-1.0, 1.0, 2)


def test_halving_tol_stays_within_old_bound():
    for lam in (-5.0, 0.37, 3.3 + 1j):
        old = ms.eval_M0(lam, 2.5, 3, tol=1e-8)
        new = ms.eval_M0(lam, 2.5, 3, tol=5e-9)
        assert abs(new.value - old.value) <= old.error_bound + new.error_bound


def test_complex_lambda_against_exact_sum():
    lam = complex(0.5, 0.25)
    exact_re = 0.0
    exact = sum((2.0**N / (4.0**N - lam) for N in range(-80, 81)), 0j) / 2
    ev = ms.eval_M0(lam, 2.0, 2)
    assert abs(ev.value - exact) <= ev.error_bound + 1e-15
    del exact_re


def test_abs_tail_covers_the_window_remainder():
    lam, alpha, p = -0.3, 2.0, 2
    full = float(m_sum(Fraction(-3, 10), 2, 2, -80, 80, power=1)) * 2  # undo the (p-1)/p factor
    inside = float(m_sum(Fraction(-3, 10), 2, 2, -5, 5, power=1)) * 2
    assert full - inside <= ms.abs_tail(lam, alpha, p, -5, 5) + 1e-15
    L, K = ms.default_window(lam, alpha, p, 1e-10)
    assert ms.abs_tail(lam, alpha, p, L, K) <= 1e-10


def test_composite_p_rejected():
    with pytest.raises(ValueError):
        ms.eval_M0(-1.0, 2.0, 4)
