"""Spectral analysis of the p-adic operator D^alpha + V_Y with point interactions."""
from .green import eval_h, h_coefficients, h_norm_sq, solvable
from .mseries import MEvaluation, SpectralGuardError, eval_diff, eval_M0, eval_M0_prime, eval_Mgamma
from .operator import (
    RealizationConfig,
    build_M,
    char_det,
    classify_realization,
    find_complex_eigenvalues,
    find_real_eigenvalues,
    resolvent_apply,
)
from .padic import PAdicRational, PrimeContext
from .wavelet import WaveletIndex, WaveletSum

__version__ = "0.1.0"
