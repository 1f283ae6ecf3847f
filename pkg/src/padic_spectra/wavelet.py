"""The p-adic wavelet basis psi_{N j eps} and finite combinations of it.

    psi_{N j eps}(x) = p^{-N/2} chi_p(p^{N-1} j x) Omega(|p^N x - eps|_p)

Each wavelet is supported on the ball |x - p^{-N} eps|_p <= p^N, is an
eigenfunction of D^alpha with eigenvalue p^{alpha(1-N)}, and the family
is orthonormal in L2(Q_p).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .padic import CosetEpsilon, as_fraction, character, coset_rep, distance_exponent
from .quadrature import ModulatedIndicator, StepFunction

FLUSH_THRESHOLD = 1e-200


@dataclass(frozen=True, order=True)
class WaveletIndex:
    N: int
    j: int
    eps: CosetEpsilon

    def __post_init__(self):
        if not 1 <= self.j <= self.eps.p - 1:
            raise ValueError(f"j must lie in 1..{self.eps.p - 1}, got {self.j}")

    @classmethod
    def make(cls, N: int, j: int, eps=0, p: int = 2) -> "WaveletIndex":
        if not isinstance(eps, CosetEpsilon):
            eps = CosetEpsilon.from_fraction(as_fraction(eps), p)
        return cls(N, j, eps)

    @property
    def p(self) -> int:
        return self.eps.p

    @property
    def center(self) -> Fraction:
        return Fraction(self.p) ** (-self.N) * self.eps.value

    @property
    def modulation(self) -> Fraction:
        return Fraction(self.p) ** (self.N - 1) * self.j

    def eigenvalue(self, alpha: float) -> float:
        return float(self.p) ** (alpha * (1 - self.N))


def eval_wavelet(idx: WaveletIndex, x) -> complex:
    p = idx.p
    x = as_fraction(x)
    if distance_exponent(Fraction(p) ** idx.N * x, idx.eps.value, p) > 0:
        return 0j
    return float(p) ** (-idx.N / 2) * character(idx.modulation * x, p)


def _compensated(values: Iterable[complex]) -> complex:
    vals = list(values)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


class WaveletSum(Mapping[WaveletIndex, complex]):
    """Finite map WaveletIndex -> coefficient; zero coefficients are never stored."""

    __slots__ = ("p", "_coeffs")

    def __init__(self, p: int, coeffs: Mapping[WaveletIndex, complex] | None = None):
        self.p = p
        self._coeffs: dict[WaveletIndex, complex] = {}
        for idx, c in (coeffs or {}).items():
            if idx.p != p:
                raise ValueError(f"index over p={idx.p} in a WaveletSum over p={p}")
            c = complex(c)
            if abs(c) > FLUSH_THRESHOLD:
                self._coeffs[idx] = c

    @classmethod
    def single(cls, idx: WaveletIndex, coefficient: complex = 1.0) -> "WaveletSum":
        return cls(idx.p, {idx: coefficient})

    def __getitem__(self, idx: WaveletIndex) -> complex:
        return self._coeffs[idx]

    def get(self, idx, default=0j):
        return self._coeffs.get(idx, default)

    def __iter__(self) -> Iterator[WaveletIndex]:
        return iter(sorted(self._coeffs))

    def __len__(self) -> int:
        return len(self._coeffs)

    def __repr__(self) -> str:
        return f"WaveletSum(p={self.p}, terms={len(self)})"

    def __add__(self, other: "WaveletSum") -> "WaveletSum":
        if other.p != self.p:
            raise ValueError("WaveletSums over different primes")
        out = dict(self._coeffs)
        for idx, c in other._coeffs.items():
            out[idx] = out.get(idx, 0j) + c
        return WaveletSum(self.p, out)

    def __sub__(self, other: "WaveletSum") -> "WaveletSum":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "WaveletSum":
        return WaveletSum(self.p, {i: c * v for i, v in self._coeffs.items()})

    def map_coefficients(self, fn) -> "WaveletSum":
        """Multiply each coefficient by fn(index)."""
        return WaveletSum(self.p, {i: v * fn(i) for i, v in self._coeffs.items()})

    def restrict(self, predicate) -> "WaveletSum":
        return WaveletSum(self.p, {i: v for i, v in self._coeffs.items() if predicate(i)})

    def conjugate(self) -> "WaveletSum":
        """Expansion of the pointwise conjugate.

        conj(psi_{N j eps}) = exp(-2 pi i eps) psi_{N (p-j) eps}.
        """
        out = {}
        for idx, c in self._coeffs.items():
            phase = character(-idx.eps.value, self.p)
            out[WaveletIndex(idx.N, self.p - idx.j, idx.eps)] = c.conjugate() * phase
        return WaveletSum(self.p, out)

    def __call__(self, x) -> complex:
        x = as_fraction(x)
        return _compensated(c * eval_wavelet(i, x) for i, c in self._coeffs.items())

    def inner(self, other: "WaveletSum") -> complex:
        """L2 inner product (self, other) computed from coefficients (orthonormality)."""
        return _compensated(c * other.get(i).conjugate() for i, c in self._coeffs.items())

    def norm_sq(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self._coeffs.values())

    def n_range(self) -> tuple[int, int]:
        ns = [i.N for i in self._coeffs]
        return min(ns), max(ns)

    def to_json(self) -> list[dict]:
        return [{"N": i.N, "j": i.j, "eps_digits": list(i.eps.digits),
                 "re": self._coeffs[i].real, "im": self._coeffs[i].imag} for i in self]

    @classmethod
    def from_json(cls, p: int, data: list[dict] | str) -> "WaveletSum":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs: dict[WaveletIndex, complex] = {}
        for row in data:
            idx = WaveletIndex(int(row["N"]), int(row["j"]),
                               CosetEpsilon(tuple(int(d) for d in row["eps_digits"]), p))
            coeffs[idx] = coeffs.get(idx, 0j) + complex(float(row["re"]), float(row.get("im", 0.0)))
        return cls(p, coeffs)


def to_step_function(ws: WaveletSum) -> StepFunction:
    """One modulated indicator per wavelet (radius exponent N)."""
    p = ws.p
    return StepFunction(p, tuple(
        ModulatedIndicator(c * float(p) ** (-i.N / 2), i.modulation, i.center, i.N)
        for i, c in ((i, ws[i]) for i in ws)))


def apply_Dalpha(ws: WaveletSum, alpha: float) -> WaveletSum:
    """Diagonal action D^alpha psi_{N j eps} = p^{alpha(1-N)} psi_{N j eps}."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return ws.map_coefficients(lambda i: i.eigenvalue(alpha))


def delta_coefficients(x_k, N_range: tuple[int, int], p: int) -> WaveletSum:
    """Window [N_min, N_max] of the expansion of delta_{x_k}.

    delta_{x_k} = sum_N sum_j p^{-N/2} chi(-p^{N-1} j x_k) psi_{N j {p^N x_k}}
    """
    n_min, n_max = N_range
    if n_min > n_max:
        raise ValueError(f"empty N range {N_range}")
    x_k = as_fraction(x_k)
    coeffs = {}
    for N in range(n_min, n_max + 1):
        eps = coset_rep(N, x_k, p)
        for j in range(1, p):
            coeffs[WaveletIndex(N, j, eps)] = (
                float(p) ** (-N / 2) * character(-Fraction(p) ** (N - 1) * j * x_k, p))
    return WaveletSum(p, coeffs)


def dilate(ws: WaveletSum) -> WaveletSum:
    """U f(x) = p^{-1/2} f(p x), which sends psi_{N j eps} to psi_{N+1, j, eps}."""
    return WaveletSum(ws.p, {WaveletIndex(i.N + 1, i.j, i.eps): ws[i] for i in ws})


def modified_wavelet(N: int, j: int, p: int) -> WaveletSum:
    """sqrt(j/(j+1)) [psi_{N, j+1, 0} - (1/j) sum_{i<=j} psi_{N i 0}], for 1 <= j <= p-2.

    These vanish at 0 and span, for fixed N, the part of the
    p^{alpha(1-N)} eigenspace orthogonal to the delta expansion at 0.
    """
    if not 1 <= j <= p - 2:
        raise ValueError(f"j must lie in 1..{p - 2} (p={p}), got {j}")
    zero = CosetEpsilon((), p)
    scale = math.sqrt(j / (j + 1))
    coeffs = {WaveletIndex(N, j + 1, zero): scale}
    for i in range(1, j + 1):
        coeffs[WaveletIndex(N, i, zero)] = -scale / j
    return WaveletSum(p, coeffs)
