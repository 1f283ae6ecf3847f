import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from padic_spectra.padic import character, coset_rep, norm
from padic_spectra.quadrature import (
    StepFunction,
    coset_sum_integral,
    fourier,
    gram_matrix,
    inner_product,
    integrate,
)
from padic_spectra.wavelet import (
    WaveletIndex,
    WaveletSum,
    apply_Dalpha,
    delta_coefficients,
    dilate,
    eval_wavelet,
    modified_wavelet,
    to_step_function,
)

from oracles import wavelet_value


def random_index(rng, p, n_range=(-2, 2), depth=2):
    N = rng.randint(*n_range)
    eps = Fraction(rng.randrange(p**depth), p**depth)
    return WaveletIndex.make(N, rng.randint(1, p - 1), eps, p)


def random_points(rng, p, k=20):
    return [Fraction(rng.randint(-p**4, p**4), p ** rng.randint(0, 4)) for _ in range(k)]


def step(idx):
    return to_step_function(WaveletSum.single(idx))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_eval_matches_defining_formula(p):
    rng = random.Random(p)
    for _ in range(15):
        idx = random_index(rng, p)
        for x in random_points(rng, p, 10):
            want = wavelet_value(idx.N, idx.j, idx.eps.value, x, p)
            assert abs(eval_wavelet(idx, x) - want) <= 1e-12
            assert abs(step(idx)(x) - want) <= 1e-12


def test_value_at_origin_and_outside_support():
    idx = WaveletIndex.make(-2, 1, 0, 3)
    assert eval_wavelet(idx, 0) == pytest.approx(3.0)
    assert eval_wavelet(idx, Fraction(1, 3)) == 0


def test_conjugate_value_at_a_point():
    p, x_k = 3, Fraction(5, 9)
    for N in range(-2, 3):
        own = coset_rep(N, x_k, p)
        for j in (1, 2):
            for e in range(27):
                idx = WaveletIndex.make(N, j, Fraction(e, 27), p)
                v = eval_wavelet(idx, x_k).conjugate()
                if idx.eps == own:
                    want = p ** (-N / 2) * character(-Fraction(p) ** (N - 1) * j * x_k, p)
                    assert abs(v - want) <= 1e-12
                else:
                    assert v == 0


@pytest.mark.parametrize("p", [2, 3])
def test_orthonormal_and_mean_zero(p):
    rng = random.Random(10 + p)
    idx = sorted({random_index(rng, p) for _ in range(25)})
    G = gram_matrix(step(i) for i in idx)
    assert np.max(np.abs(G - np.eye(len(idx)))) <= 1e-12
    for i in idx[:8]:
        assert integrate(step(i)) == 0
        assert abs(coset_sum_integral(step(i))) <= 1e-12


def test_fourier_support_is_a_sphere():
    rng = random.Random(3)
    for _ in range(20):
        p = rng.choice([2, 3, 5])
        idx = random_index(rng, p)
        for t in fourier(step(idx)).terms:
            assert norm(t.center, p) == Fraction(p) ** (1 - idx.N)
            assert t.radius < 1 - idx.N


def test_apply_dalpha():
    idx = WaveletIndex.make(0, 1, 0, 2)
    ws = WaveletSum.single(idx)
    assert apply_Dalpha(ws, 2.0)[idx] == pytest.approx(4.0)
    assert apply_Dalpha(WaveletSum.single(WaveletIndex.make(1, 1, 0, 2)), 2.0).get(
        WaveletIndex.make(1, 1, 0, 2)) == 1
    with pytest.raises(ValueError):
        apply_Dalpha(ws, 0.0)


@pytest.mark.parametrize("p,x_k", [(2, Fraction(3, 4)), (3, Fraction(-1, 3)), (5, Fraction(7))])
def test_delta_pairing_reproduces_point_values(p, x_k):
    rng = random.Random(p)
    window = (-2, 3)
    delta = to_step_function(delta_coefficients(x_k, window, p))
    u = WaveletSum(p, {random_index(rng, p, window): complex(rng.gauss(0, 1), rng.gauss(0, 1))
                       for _ in range(10)})
    # <delta, u> = sum_i c_i conj(d_i) because d_i = conj(psi_i(x_k))
    assert abs(u.inner(delta_coefficients(x_k, window, p)) - u(x_k)) <= 1e-12
    assert abs(inner_product(to_step_function(u), delta) - u(x_k)) <= 1e-12


def test_delta_at_origin_has_trivial_cosets():
    ws = delta_coefficients(0, (-3, 3), 3)
    assert all(not i.eps for i in ws)
    with pytest.raises(ValueError):
        delta_coefficients(0, (2, 1), 3)


def test_dilation():
    rng = random.Random(8)
    p = 3
    ws = WaveletSum(p, {random_index(rng, p): rng.gauss(0, 1) for _ in range(6)})
    d = dilate(ws)
    for x in random_points(rng, p, 10):
        assert abs(d(x) - p**-0.5 * ws(p * x)) <= 1e-12
    alpha = 1.5
    lhs = apply_Dalpha(dilate(ws), alpha)
    rhs = dilate(apply_Dalpha(ws, alpha)).scale(p**-alpha)
    assert math.sqrt((lhs - rhs).norm_sq()) <= 1e-12
    other = WaveletSum(p, {random_index(rng, p): 1.0 for _ in range(6)})
    assert abs(dilate(ws).inner(dilate(other)) - ws.inner(other)) <= 1e-15


def test_modified_wavelets():
    ws = modified_wavelet(0, 1, 3)
    assert ws[WaveletIndex.make(0, 2, 0, 3)] == pytest.approx(math.sqrt(0.5))
    assert ws[WaveletIndex.make(0, 1, 0, 3)] == pytest.approx(-math.sqrt(0.5))
    fam = [modified_wavelet(1, j, 7) for j in range(1, 6)]
    G = gram_matrix(to_step_function(w) for w in fam)
    assert np.max(np.abs(G - np.eye(5))) <= 1e-12
    delta = delta_coefficients(0, (1, 1), 7)
    for w in fam:
        assert abs(w(0)) <= 1e-12
        assert abs(w.inner(delta)) <= 1e-12
    with pytest.raises(ValueError):
        modified_wavelet(0, 1, 2)


def test_conjugate_expansion_matches_pointwise():
    rng = random.Random(2)
    p = 5
    ws = WaveletSum(p, {random_index(rng, p): complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(5)})
    for x in random_points(rng, p, 10):
        assert abs(ws.conjugate()(x) - ws(x).conjugate()) <= 1e-12


def test_json_round_trip_and_flush():
    rng = random.Random(5)
    ws = WaveletSum(3, {random_index(rng, 3): complex(rng.gauss(0, 1), 1) for _ in range(4)})
    back = WaveletSum.from_json(3, json.dumps(ws.to_json()))
    assert dict(back) == dict(ws)
    assert len(WaveletSum(3, {random_index(rng, 3): 1e-250})) == 0


def test_index_validation():
    with pytest.raises(ValueError):
        WaveletIndex.make(0, 0, 0, 3)
    with pytest.raises(ValueError):
        WaveletSum(2, {WaveletIndex.make(0, 1, 0, 3): 1.0})
