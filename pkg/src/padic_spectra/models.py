"""Worked models: two-point Friedrichs, symmetric and parity-symmetric two-point
interactions, and the one-point operator A_b = D^alpha + b <delta_0, .> delta_0.

Every model reduces to scalar characteristic functions built from M_0 and
M_{p^gamma}; each is monotone between consecutive poles, so a sign-change
scan per interval finds all roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .green import h_coefficients, default_h_window
from .mseries import (
    DEFAULT_TOL,
    EPS,
    diff_closed_form_claim,
    SpectralGuardError,
    eval_diff,
    eval_M0,
    eval_M0_prime,
    eval_Mgamma,
)
from .operator import (
    RealizationConfig,
    build_M,
    eta_matrix_parity,
    find_real_eigenvalues,
    negative_axis_bounds,
    scan_scalar,
    spectral_intervals,
)
from .padic import as_fraction, distance_exponent
from .wavelet import WaveletIndex, WaveletSum, dilate, modified_wavelet

INF_B = math.inf

Root = tuple  # (interval tag, lambda)


@dataclass
class ClassifiedSpectrum:
    """Type-1 roots (M_0 = M_{p^gamma}) and type-2 roots, tagged by interval N."""

    type1: list[tuple[int, float]] = field(default_factory=list)
    type2: list[tuple[int, float]] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    window: tuple[int, int] = (0, 0)

    def all_roots(self) -> list[float]:
        neg = list(self.extra.get("negative_roots", []))
        neg += [self.extra[k] for k in ("lambda_minus", "lambda_plus") if k in self.extra]
        return sorted(neg + [lam for _, lam in self.type1 + self.type2])

    def to_json(self) -> dict:
        return {"window": list(self.window),
                "type1": [[n, lam] for n, lam in self.type1],
                "type2": [[n, lam] for n, lam in self.type2],
                "extra": self.extra}


def _scan(fn: Callable[[float], float], alpha: float, p: int, window: tuple[int, int] | None,
          negative_axis: bool = False, t_range=(-40.0, 40.0)) -> list[Root]:
    """Sign-change roots of fn per spectral interval, plus (-inf, 0) on request."""
    out: list[Root] = []
    if negative_axis:
        lo, hi = negative_axis_bounds(t_range)
        out += [("negative-axis", -x) for x in sorted(scan_scalar(lambda x: fn(-x), lo, hi))]
    for N, lo, hi in (spectral_intervals(alpha, p, window) if window else []):
        out += [(N, x) for x in scan_scalar(fn, lo, hi)]
    return out


def _m0(lam, alpha, p, tol=DEFAULT_TOL) -> float:
    return float(eval_M0(lam, alpha, p, tol).value)


def _mg(gamma, lam, alpha, p, tol=DEFAULT_TOL) -> float:
    return float(eval_Mgamma(gamma, lam, alpha, p, tol).value)


def _diff(gamma, lam, alpha, p, tol=DEFAULT_TOL) -> float:
    return float(eval_diff(gamma, lam, alpha, p, tol).value)


def _split(roots: list[Root]) -> tuple[list[tuple[int, float]], list[float]]:
    pos = [(t, lam) for t, lam in roots if t != "negative-axis"]
    neg = [lam for t, lam in roots if t == "negative-axis"]
    return pos, neg


# --- Friedrichs extension ---------------------------------------------------

def friedrichs_spectrum(points: Sequence, alpha: float, p: int, window: tuple[int, int],
                        negative_axis: bool = False, tol: float = DEFAULT_TOL) -> ClassifiedSpectrum:
    """Discrete spectrum of the Friedrichs extension (B = infinity).

    Two points: type-1 roots solve M_0 - M_{p^gamma} = 0, type-2 roots
    solve M_0 + M_{p^gamma} = 0.  More points: roots of det M(lam) from the
    operator scan; a root is type-1 when some M_0 - M_{p^g} changes sign
    across it.
    """
    pts = [as_fraction(x) for x in points]
    if len(pts) == 2:
        gamma = distance_exponent(pts[0], pts[1], p)
        t1 = _scan(lambda lam: _diff(gamma, lam, alpha, p, tol), alpha, p, window, negative_axis)
        t2 = _scan(lambda lam: _m0(lam, alpha, p, tol) + _mg(gamma, lam, alpha, p, tol),
                   alpha, p, window, negative_axis)
        pos1, neg1 = _split(t1)
        pos2, neg2 = _split(t2)
        extra = {"gamma": gamma}
        if negative_axis:
            extra["negative_roots"] = neg1 + neg2
        return ClassifiedSpectrum(pos1, pos2, extra, window)

    config = RealizationConfig(p, alpha, pts, None)
    records = find_real_eigenvalues(config, window, negative_axis, tol)
    type1, type2, matched = [], [], {}
    for r in records:
        lam = float(np.real(r.lam))
        if r.interval == "negative-axis":
            type2.append(("negative-axis", lam))
            continue
        g = _type1_gamma(lam, r.interval, alpha, p, window, tol)
        if g is None:
            type2.append((r.interval, lam))
        else:
            type1.append((r.interval, lam))
            matched[repr(lam)] = g
    return ClassifiedSpectrum(type1, type2, {"type1_gamma": matched}, window)


def _type1_gamma(lam: float, N: int, alpha: float, p: int, window, tol) -> int | None:
    """Smallest gamma with a sign change of M_0 - M_{p^gamma} across lam, if any.

    Only gamma >= 1 - N can have a root in interval N, and gamma > 1 - window[0]
    would put the onset below the scanned window.
    """
    lo, hi = lam * (1 - 1e-8), lam * (1 + 1e-8)
    for gamma in range(1 - N, 2 - window[0] + (window[1] - window[0])):
        try:
            a, b = _diff(gamma, lo, alpha, p, tol), _diff(gamma, hi, alpha, p, tol)
        except SpectralGuardError:
            continue
        if (a < 0) != (b < 0) and abs(a) + abs(b) < 1e3 * (abs(_m0(lam, alpha, p, tol)) + 1):
            return gamma
    return None


def recover_gamma_min(spec: ClassifiedSpectrum) -> int:
    """gamma_min from the type-1 roots.

    Two points: 1 - (lowest interval carrying a type-1 root).  With more
    points several pairs can contribute an exact factor M_0 - M_{p^g}, and
    the closest pair has the latest onset, so the per-root g is used.
    """
    if not spec.type1:
        raise ValueError("type-1 part is empty; widen the window")
    matched = spec.extra.get("type1_gamma")
    if matched:
        return min(matched.values())
    return 1 - min(n for n, _ in spec.type1)


def check_type1_factor(points: Sequence, lam, alpha: float, p: int,
                       tol: float = DEFAULT_TOL) -> float:
    """Subtract the rows of a closest pair in M(lam); return the max deviation
    from (M_0 - M_{p^gmin}) (e_i - e_j)."""
    pts = [as_fraction(x) for x in points]
    n = len(pts)
    pairs = [(distance_exponent(pts[i], pts[j], p), i, j) for i in range(n) for j in range(i + 1, n)]
    gmin, i, j = min(pairs)
    M = build_M(RealizationConfig(p, alpha, pts, None), lam, tol)
    row = M[i] - M[j]
    target = np.zeros(n)
    d = _diff(gmin, lam, alpha, p, tol)
    target[i], target[j] = d, -d
    return float(np.max(np.abs(row - target)))


# --- two-point interactions -------------------------------------------------

def exceptional_values(gamma: int, alpha: float, p: int, window: tuple[int, int],
                       tol: float = DEFAULT_TOL) -> dict[int, float]:
    """[M_0 - M_{p^gamma}](p^{alpha m}) for the window's m < 1 - gamma.

    If b - a equals one of these the would-be type-1 point sits on an
    eigenvalue of infinite multiplicity instead.
    """
    return {m: _diff(gamma, float(p) ** (alpha * m), alpha, p, tol)
            for m in range(window[0], min(window[1], -gamma) + 1)}


def two_point_symmetric_spectrum(a: float, b: float, gamma: int, alpha: float, p: int,
                                 window: tuple[int, int], negative_axis: bool = True,
                                 tol: float = DEFAULT_TOL) -> ClassifiedSpectrum:
    """Roots of (M_0 - M_{p^gamma} + a - b)(M_0 + M_{p^gamma} + a + b).

    ``extra`` holds the negative type-1 point ``lambda_minus`` (exists iff
    0 < b - a < [M_0 - M_{p^gamma}](0)) and the negative type-2 point
    ``lambda_plus`` (exists iff a + b < 0).
    """
    f1 = lambda lam: _diff(gamma, lam, alpha, p, tol) + a - b  # noqa: E731
    f2 = lambda lam: _m0(lam, alpha, p, tol) + _mg(gamma, lam, alpha, p, tol) + a + b  # noqa: E731
    pos1, neg1 = _split(_scan(f1, alpha, p, window, negative_axis))
    pos2, neg2 = _split(_scan(f2, alpha, p, window, negative_axis))
    threshold = _diff(gamma, 0.0, alpha, p, tol)
    claim = diff_closed_form_claim(gamma, alpha, p)
    extra: dict = {"gamma": gamma, "threshold": threshold,
                   "threshold_closed_form_claim": claim,
                   "closed_form_matches": abs(claim - threshold) <= 1e-9 * threshold,
                   "lambda_minus_predicted": 0 < b - a < threshold,
                   "lambda_plus_predicted": a + b < 0}
    if neg1:
        extra["lambda_minus"] = neg1[0]
    if neg2:
        extra["lambda_plus"] = neg2[0]
    hits = [m for m, v in exceptional_values(gamma, alpha, p, window, tol).items()
            if abs(v - (b - a)) <= 1e-9 * max(1.0, abs(v))]
    extra["exceptional_hits"] = hits
    extra["exceptional_checked"] = list(window)
    return ClassifiedSpectrum(pos1, pos2, extra, window)


def pt_config(a: float, b: float, gamma: int, alpha: float, p: int) -> RealizationConfig:
    """Points {x, -x} with |2x|_p = p^gamma and B^{-1} = [[-ia, b], [-b, ia]]."""
    x = Fraction(p) ** (-gamma - 1) if p == 2 else Fraction(p) ** (-gamma) / 2
    binv = np.array([[-1j * a, b], [-b, 1j * a]])
    return RealizationConfig(p, alpha, [x, -x], np.linalg.inv(binv), eta_matrix_parity([x, -x]))


def pt_char(lam: float, a: float, b: float, gamma: int, alpha: float, p: int,
            tol: float = DEFAULT_TOL) -> float:
    """(M_0 - M_{p^gamma})(M_0 + M_{p^gamma}) + a^2 + b^2 (real on the real axis)."""
    m0, mg = _m0(lam, alpha, p, tol), _mg(gamma, lam, alpha, p, tol)
    return (m0 - mg) * (m0 + mg) + a * a + b * b


@dataclass
class PTReport:
    roots: list[tuple]
    negative_roots: list[float]
    brackets: dict[int, dict]

    def to_json(self) -> dict:
        return {"roots": [[t, lam] for t, lam in self.roots],
                "negative_roots": self.negative_roots,
                "brackets": {str(k): v for k, v in self.brackets.items()}}


def pt_two_point_real_eigenvalues(a: float, b: float, gamma: int, alpha: float, p: int,
                                  window: tuple[int, int], tol: float = DEFAULT_TOL) -> PTReport:
    """Real eigenvalues of the parity-symmetric two-point model.

    For each interval the report records where the roots sit relative to
    p^{alpha N} and the symmetric model's lambda_N^+ and lambda_N^-.
    """
    roots = _scan(lambda lam: pt_char(lam, a, b, gamma, alpha, p, tol), alpha, p, window, True)
    pos, neg = _split(roots)
    ref = friedrichs_spectrum_two_point(gamma, alpha, p, window, tol)
    brackets: dict[int, dict] = {}
    for N, lo, hi in spectral_intervals(alpha, p, window):
        mine = [lam for t, lam in pos if t == N]
        plus = [lam for t, lam in ref.type2 if t == N]
        minus = [lam for t, lam in ref.type1 if t == N]
        info: dict = {"roots": mine, "lambda_plus": plus[0] if plus else None,
                      "lambda_minus": minus[0] if minus else None}
        if N < -gamma and plus:
            info["bracket_ok"] = all(lo < lam < plus[0] for lam in mine) and len(mine) == 1
        elif N >= 1 - gamma and plus and minus:
            info["bracket_ok"] = all(plus[0] < lam < minus[0] for lam in mine)
        brackets[N] = info
    return PTReport(pos, neg, brackets)


def friedrichs_spectrum_two_point(gamma: int, alpha: float, p: int, window: tuple[int, int],
                                  tol: float = DEFAULT_TOL) -> ClassifiedSpectrum:
    return two_point_symmetric_spectrum(0.0, 0.0, gamma, alpha, p, window, False, tol)


def pt_onset_sweep(a: float, b: float, gamma: int, alpha: float, p: int, N: int,
                   scales: Sequence[float] = (1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001),
                   tol: float = DEFAULT_TOL) -> list[dict]:
    """Root count in interval N as (a, b) shrink; reports the empirical onset only."""
    out = []
    for s in scales:
        rep = pt_two_point_real_eigenvalues(s * a, s * b, gamma, alpha, p, (N, N), tol)
        out.append({"scale": s, "a": s * a, "b": s * b, "roots": rep.brackets[N]["roots"]})
    return out


# --- one-point model A_b -------------------------------------------------

def _one_point_fn(b: float, alpha: float, p: int, tol: float):
    if math.isinf(b):
        return lambda lam: _m0(lam, alpha, p, tol)
    return lambda lam: _m0(lam, alpha, p, tol) + 1.0 / b


def one_point_eigenvalues(b: float, alpha: float, p: int, window: tuple[int, int],
                          negative_axis: bool = True, tol: float = DEFAULT_TOL) -> list[Root]:
    """Roots of M_0(lam) = -1/b (M_0 = 0 for b = inf); b = 0 is the free operator."""
    if b == 0:
        return []
    fn = _one_point_fn(b, alpha, p, tol)
    roots = _scan(fn, alpha, p, window, negative_axis)
    return sorted(((t, _polish(fn, lam, alpha, p, tol)) for t, lam in roots), key=lambda r: r[1])


def _polish(fn, lam: float, alpha: float, p: int, tol: float, steps: int = 4) -> float:
    """Newton steps with M_0' (the derivative of every one-point function)."""
    best, best_res = lam, abs(fn(lam))
    for _ in range(steps):
        lam = lam - fn(lam) / float(eval_M0_prime(lam, alpha, p, tol).value)
        res = abs(fn(lam))
        if res >= best_res:
            break
        best, best_res = lam, res
    return best


def one_point_root(b: float, N: int | str, alpha: float, p: int, tol: float = DEFAULT_TOL) -> float:
    if N == "negative-axis":
        roots = [lam for _, lam in one_point_eigenvalues(b, alpha, p, None, True, tol)]
    else:
        roots = [lam for _, lam in one_point_eigenvalues(b, alpha, p, (N, N), False, tol)]
    if len(roots) != 1:
        raise ValueError(f"expected one root in interval {N}, found {len(roots)}")
    return roots[0]


@dataclass(frozen=True)
class Eigenfunction:
    lam: float
    coefficients: WaveletSum
    window: tuple[int, int]
    l2_tail_bound: float


def one_point_eigenfunction(b: float, lam: float, alpha: float, p: int,
                            N_range: tuple[int, int] | None = None,
                            tol: float = DEFAULT_TOL) -> Eigenfunction:
    """Normalised h_{0,lam} / sqrt(M_0'(lam)) on a wavelet window."""
    if N_range is None:
        N_range = default_h_window(lam, alpha, p, tol)
    g = h_coefficients(0, lam, alpha, p, N_range, tol)
    scale = 1.0 / math.sqrt(float(eval_M0_prime(lam, alpha, p, tol).value))
    return Eigenfunction(lam, g.coefficients.scale(scale), N_range, g.l2_tail_bound * scale)


def one_point_kernel_basis(N: int, p: int) -> list[WaveletSum]:
    """The p - 2 modified wavelets at scale N vanishing at 0.

    Together with psi_{N j eps}, eps != 0, they span the eigenspace of
    p^{alpha(1-N)} for every A_b.
    """
    if p == 2:
        raise ValueError("p = 2 has no modified wavelets")
    return [modified_wavelet(N, j, p) for j in range(1, p - 1)]


def spectral_shift(b: float, lam: float, alpha: float, p: int, tol: float = DEFAULT_TOL,
                   jump_rtol: float = 1e-9) -> int:
    """Krein's spectral shift xi_b(lam) from the piecewise formula.

    1 on (lam_-, 0) and on each (p^{alpha N}, lam_{N,b}); 0 elsewhere.
    """
    if b == 0:
        raise ValueError("b = 0 is the free operator")
    if lam == 0:
        raise ValueError("lambda = 0 is a jump point")
    if lam < 0:
        if b > 0:
            return 0
        root = one_point_root(b, "negative-axis", alpha, p, tol)
        _check_jump(lam, root, jump_rtol)
        return 1 if lam > root else 0
    N = math.floor(math.log(lam) / (alpha * math.log(p)))
    edges = (float(p) ** (alpha * N), float(p) ** (alpha * (N + 1)))
    for e in edges:
        _check_jump(lam, e, jump_rtol)
    root = one_point_root(b, N, alpha, p, tol)
    _check_jump(lam, root, jump_rtol)
    return 1 if lam < root else 0


def _check_jump(lam: float, jump: float, rtol: float) -> None:
    if abs(lam - jump) <= rtol * abs(jump):
        raise ValueError(f"lambda={lam} is on a jump of the spectral shift ({jump})")


@dataclass
class HomogeneityReport:
    b: float
    homogeneous: bool
    details: dict

    def to_json(self) -> dict:
        return {"b": "inf" if math.isinf(self.b) else self.b, "homogeneous": self.homogeneous,
                "details": self.details}


def homogeneity_check(b: float, alpha: float, p: int, N: int,
                      tol: float = DEFAULT_TOL) -> HomogeneityReport:
    """Dilation behaviour of the eigenbasis of A_b at scale N.

    b = 0: dilate maps basis wavelets to basis wavelets.  b = inf: the roots
    obey lam_{N+1} = p^alpha lam_N and U phi_N = phi_{N-1}.  Finite b != 0:
    mu = p^{-alpha} lam_{N,b} satisfies M_0(mu) = p^{alpha-1}(-1/b) != -1/b,
    so mu is not an eigenvalue and no dilation-invariant eigenbasis exists.
    """
    if b == 0:
        idx = [WaveletIndex.make(N, j, 0, p) for j in range(1, p)]
        ok = all(dict(dilate(WaveletSum.single(i))) == {WaveletIndex(N + 1, i.j, i.eps): 1.0}
                 for i in idx)
        return HomogeneityReport(b, ok, {"basis_mapped_to_basis": ok})
    if math.isinf(b):
        lam_n = one_point_root(b, N, alpha, p, tol)
        lam_next = one_point_root(b, N + 1, alpha, p, tol)
        rel = abs(lam_next - float(p) ** alpha * lam_n) / lam_next
        lam_prev = one_point_root(b, N - 1, alpha, p, tol)
        phi = one_point_eigenfunction(b, lam_n, alpha, p, tol=tol)
        lo, hi = phi.window
        phi_prev = one_point_eigenfunction(b, lam_prev, alpha, p, (lo + 1, hi + 1), tol)
        gap = math.sqrt((dilate(phi.coefficients) - phi_prev.coefficients).norm_sq())
        bound = phi.l2_tail_bound + phi_prev.l2_tail_bound + 1e-12
        ok = rel <= 1e-9 and gap <= bound
        return HomogeneityReport(b, ok, {"recurrence_rel_error": rel, "dilation_gap": gap,
                                         "dilation_bound": bound})
    lam_n = one_point_root(b, N, alpha, p, tol)
    mu = float(p) ** (-alpha) * lam_n
    m0 = eval_M0(mu, alpha, p, tol)
    at_root = eval_M0(lam_n, alpha, p, tol)
    predicted = float(p) ** (alpha - 1) * (-1.0 / b)
    # lam_N is a float root: its residual propagates through the scaling identity
    residual = abs(float(at_root.value) + 1.0 / b) + at_root.error_bound
    bound = float(m0.error_bound + float(p) ** (alpha - 1) * residual + 4 * EPS * abs(predicted))
    certificate = bool(abs(float(m0.value) - predicted) <= bound)
    gap = abs(float(m0.value) + 1.0 / b)
    return HomogeneityReport(b, False, {
        "lambda_N": lam_n, "mu": mu, "M0_mu": float(m0.value), "certificate_bound": bound,
        "predicted": predicted, "certificate_holds": certificate, "distance_from_minus_inv_b": gap})
