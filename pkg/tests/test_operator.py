import math
from fractions import Fraction

import numpy as np
import pytest

from padic_spectra.green import DomainElement, GreenComponent, eval_h
from padic_spectra.mseries import SpectralGuardError, eval_M0, eval_Mgamma
from padic_spectra.operator import (
    RealizationConfig,
    boundary_data,
    boundary_residual,
    build_M,
    build_M_prime,
    char_det,
    classify_realization,
    eta_matrix_parity,
    find_complex_eigenvalues,
    find_real_eigenvalues,
    resolvent_apply,
    resolvent_boundary_values,
    shifted_image,
    winding_number,
)
from padic_spectra.wavelet import WaveletIndex, WaveletSum

import oracles


def test_config_validation():
    with pytest.raises(ValueError):
        RealizationConfig(2, 2.0, [])
    with pytest.raises(ValueError):
        RealizationConfig(2, 2.0, [1, 1])
    with pytest.raises(ValueError):
        RealizationConfig(2, 1.0, [0])
    with pytest.raises(ValueError):
        RealizationConfig(2, 2.0, [0, 1], B=np.eye(3))
    with pytest.raises(ValueError):
        RealizationConfig(2, 2.0, [0, 1], eta=np.zeros((2, 2)))


def test_build_M_entries_and_symmetry():
    c = RealizationConfig(2, 2.0, [0, 1, Fraction(1, 2)])
    M = build_M(c, -1.0)
    assert np.allclose(M, M.T)
    assert abs(M[0, 0] - oracles.M0_P2_A2_LAM_M1) < 1e-12
    assert abs(M[0, 1] - oracles.MG0_P2_A2_LAM_M1) < 1e-12
    # |1/2|_2 = 2 and |1 - 1/2|_2 = 2
    g1 = eval_Mgamma(1, -1.0, 2.0, 2).value
    assert abs(M[0, 2] - g1) < 1e-14 and abs(M[1, 2] - g1) < 1e-14
    # real lambda gives a real symmetric matrix, M' is positive definite
    assert np.all(np.linalg.eigvalsh(build_M_prime(c, -1.0).real) > 0)


def test_M_is_conjugation_symmetric():
    c = RealizationConfig(3, 2.0, [0, 1, Fraction(1, 3)])
    z = 0.7 + 0.3j
    assert np.allclose(build_M(c, z).conj(), build_M(c, z.conjugate()))


def test_classification():
    pts = [1, -1]
    assert classify_realization(RealizationConfig(3, 2.0, pts)) == "self_adjoint"
    assert classify_realization(RealizationConfig(3, 2.0, pts, B=[[1, 2j], [-2j, 0]])) == "self_adjoint"
    eta = eta_matrix_parity(pts)
    pt = RealizationConfig(3, 2.0, pts, B=[[-1j, 1], [-1, 1j]], eta=eta)
    assert classify_realization(pt) == "eta_self_adjoint"
    assert classify_realization(RealizationConfig(3, 2.0, pts, B=[[1j, 0], [0, 1]], eta=eta)) == "neither"
    with pytest.raises(ValueError):
        classify_realization(RealizationConfig(3, 2.0, pts, B=[[1, 0], [0, 1]]), use_eta=True)


def test_eta_parity():
    assert np.array_equal(eta_matrix_parity([0]), [[1.0]])
    assert np.array_equal(eta_matrix_parity([2, -2]), [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        eta_matrix_parity([1, 2])


def test_char_det_small_cases():
    c0 = RealizationConfig(2, 2.0, [0, 1], B=np.zeros((2, 2)))
    assert char_det(c0, -1.0) == 1
    for b in (-2.0, 0.5, 3.0):
        c = RealizationConfig(2, 2.0, [0], B=[[b]])
        assert abs(char_det(c, -1.0) - (b * oracles.M0_P2_A2_LAM_M1 + 1)) < 1e-12


def _bisect(f, a, b):
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def test_one_point_scan_matches_direct_bisection():
    b, p, alpha = -1.0, 2, 2.0
    recs = find_real_eigenvalues(RealizationConfig(p, alpha, [0], B=[[b]]), (-2, 2), negative_axis=True)
    f = lambda x: b * eval_M0(x, alpha, p).value + 1
    want = [_bisect(f, -50.0, -0.01)] + [_bisect(f, 4.0**N * (1 + 1e-7), 4.0 ** (N + 1) * (1 - 1e-7))
                                          for N in range(-2, 3)]
    assert len(recs) == len(want)
    for r, w in zip(recs, want):
        assert abs(r.lam.real - w) <= 1e-9 * abs(w)
        assert r.multiplicity == 1
    assert recs[0].interval == "negative-axis"
    assert [r.interval for r in recs[1:]] == [-2, -1, 0, 1, 2]


def test_friedrichs_single_point_roots_are_zeros_of_m0():
    recs = find_real_eigenvalues(RealizationConfig(2, 2.0, [0]), (0, 1))
    for r in recs:
        assert abs(eval_M0(r.lam.real, 2.0, 2).value) < 1e-8


def test_repeated_eigenvalue_multiplicity():
    # two distant copies of one point couple only through a tiny M_gamma,
    # so the eigenvalue nearly doubles but still splits
    c = RealizationConfig(2, 2.0, [0, Fraction(1, 2**10)], B=-np.eye(2))
    recs = find_real_eigenvalues(c, (0, 0))
    assert sum(r.multiplicity for r in recs) == 2


def test_complex_search_and_winding():
    c = RealizationConfig(2, 2.0, [0], B=[[-1 + 0.5j]])
    for rect in [(1.2, 3.8, -2, 2), (-3, -0.5, -2, 2), (4.5, 15, -5, 5)]:
        recs = find_complex_eigenvalues(c, rect)
        assert len(recs) == winding_number(c, rect) == 1
        z = recs[0].lam
        assert abs(char_det(c, z)) < 1e-10
        # one-point root solves M_0(z) = -1/b
        assert abs(eval_M0(z, 2.0, 2).value + 1 / (-1 + 0.5j)) < 1e-10
    with pytest.raises(ValueError):
        find_complex_eigenvalues(c, (-3, 3, -2, 2))


def test_hermitian_scan_agrees_with_complex_search_near_axis():
    c = RealizationConfig(3, 2.0, [0, 1], B=[[-1, 0.5], [0.5, 2]])
    real = [r.lam.real for r in find_real_eigenvalues(c, (0, 0))]
    lo, hi = 1.0, 9.0
    rect = (lo + 1e-3, hi - 1e-3, -0.5, 0.5)
    cx = find_complex_eigenvalues(c, rect)
    assert len(cx) == len(real)
    for r, z in zip(real, sorted(x.lam.real for x in cx)):
        assert abs(r - z) < 1e-8 * max(1, abs(r))
    assert all(abs(x.lam.imag) < 1e-10 for x in cx)


def test_boundary_data():
    c = RealizationConfig(2, 2.0, [0, 1])
    u = WaveletSum.single(WaveletIndex.make(0, 1, 0, 2), 2.0)
    f = DomainElement(u, (GreenComponent(Fraction(0), -1, 3.0),))
    bd = boundary_data(c, f)
    want0 = [u(0) + 3 * eval_h(0, -1.0, 0, 2.0, 2).value, u(1) + 3 * eval_h(0, -1.0, 1, 2.0, 2).value]
    assert np.allclose(bd.gamma0, want0)
    assert np.allclose(bd.gamma1, [-3, 0])
    with pytest.raises(ValueError):
        boundary_data(c, DomainElement(u, (GreenComponent(Fraction(5), -1, 1.0),)))
    with pytest.raises(ValueError):
        boundary_data(c, DomainElement(u, (GreenComponent(Fraction(0), 2, 1.0),)))


def _input(p):
    return WaveletSum(p, {WaveletIndex.make(0, 1, 0, p): 1.0,
                          WaveletIndex.make(-1, 1, Fraction(1, p), p): 0.5 - 0.25j,
                          WaveletIndex.make(1, p - 1, 0, p): -0.3})


def test_resolvent_with_zero_B_is_free_resolvent():
    c = RealizationConfig(3, 2.0, [0, 1], B=np.zeros((2, 2)))
    f = _input(3)
    res = resolvent_apply(c, 0.5 + 1j, f)
    assert np.allclose(res.weights, 0)
    for idx, coef in f.items():
        assert abs(res.diagonal[idx] - coef / (idx.eigenvalue(2.0) - (0.5 + 1j))) < 1e-15


@pytest.mark.parametrize("B", [None, [[1.0, 0.2], [0.2, -0.5]], [[-1j, 1], [-1, 1j]]])
def test_resolvent_boundary_condition_and_equation(B):
    c = RealizationConfig(3, 2.0, [0, Fraction(1, 3)], B=B)
    f = _input(3)
    lam = -0.4 + 0.8j
    res = resolvent_apply(c, lam, f)
    assert boundary_residual(c, res) < 1e-10
    window = (-6, 6)
    image = shifted_image(c, res, window)
    assert (image - f).norm_sq() < 1e-20


def test_resolvent_rejects_spectral_points():
    c = RealizationConfig(2, 2.0, [0], B=[[-1.0]])
    with pytest.raises(SpectralGuardError):
        resolvent_apply(c, 4.0, _input(2))
    lam = find_real_eigenvalues(c, (0, 0))[0].lam.real
    with pytest.raises(np.linalg.LinAlgError):
        resolvent_apply(c, lam, _input(2))


def test_eigenvector_in_kernel():
    c = RealizationConfig(2, 2.0, [0, 1, Fraction(1, 4)], B=[[0, 1, 0], [1, 0, 0], [0, 0, -2]])
    for r in find_real_eigenvalues(c, (-1, 1), negative_axis=True):
        A = c.B @ build_M(c, r.lam.real) + np.eye(3)
        s = np.linalg.svd(A, compute_uv=False)
        assert s[-1] <= 1e-8 * s[0]


def test_composite_p_rejected():
    with pytest.raises(ValueError):
        RealizationConfig(6, 2.0, [0])
