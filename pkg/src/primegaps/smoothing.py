"""Smoothed periodic indicator used in the weighted Beatty sums.

The concrete realization is the trapezoid: the indicator of (0, gamma]
convolved with the uniform kernel of width 2*delta.  Its Fourier
coefficients are closed-form and sit strictly inside the classical bound
max(|g_k|, |h_k|) <= min(2/(pi k), 2/(pi^2 k^2 delta)).

Evaluation is generic over the numeric type: Fraction inputs stay exact,
which the plateau tests rely on.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class PsiDelta:
    """Trapezoid parameters: plateau height 1 on [delta, gamma-delta]."""

    gamma: object  # float or Fraction in (0, 1)
    delta: object  # float or Fraction in (0, 1/8), <= min(gamma, 1-gamma)/2
    kmax: int = 1000

    def __post_init__(self):
        g, d = self.gamma, self.delta
        if not 0 < g < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < d < Fraction(1, 8):
            raise ValueError("delta must lie in (0, 1/8)")
        if not d <= min(g, 1 - g) / 2:
            raise ValueError("delta must be <= min(gamma, 1-gamma)/2")
        if self.kmax < 1:
            raise ValueError("kmax must be >= 1")


def psi(x, gamma) -> int:
    """Sharp indicator: 1 if 0 < {x} <= gamma, else 0 (period 1)."""
    t = x - math.floor(x) if not isinstance(x, Fraction) else x - (x.numerator // x.denominator)
    return 1 if 0 < t <= gamma else 0


def psi_delta_eval(p: PsiDelta, x):
    """Trapezoid value at x; exact when x, gamma, delta are Fractions."""
    g, d = p.gamma, p.delta
    if isinstance(x, Fraction):
        t = x - (x.numerator // x.denominator)
    else:
        t = x - math.floor(x)
    two_d = 2 * d
    if t < d:
        return (t + d) / two_d
    if t <= g - d:
        return 1 if isinstance(t, Fraction) else 1.0
    if t < g + d:
        return (g + d - t) / two_d
    if t <= 1 - d:
        return 0 if isinstance(t, Fraction) else 0.0
    return (t - 1 + d) / two_d


def psi_delta_eval_array(p: PsiDelta, xs: np.ndarray) -> np.ndarray:
    g, d = float(p.gamma), float(p.delta)
    t = np.mod(xs, 1.0)
    up = (t + d) / (2 * d)
    down = (g + d - t) / (2 * d)
    tail = (t - 1 + d) / (2 * d)
    out = np.zeros_like(t)
    out = np.where(t < d, up, out)
    out = np.where((t >= d) & (t <= g - d), 1.0, out)
    out = np.where((t > g - d) & (t < g + d), down, out)
    out = np.where(t > 1 - d, tail, out)
    return out


def psi_delta_fourier(p: PsiDelta, k: int) -> tuple[complex, complex]:
    """Coefficients (g_k, h_k) of e(kx) and e(-kx); h_k = conj(g_k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    g, d = float(p.gamma), float(p.delta)
    kernel = math.sin(2 * math.pi * k * d) / (2 * math.pi * k * d)
    gk = cmath.exp(-1j * math.pi * k * g) * (math.sin(math.pi * k * g) / (math.pi * k)) * kernel
    return gk, gk.conjugate()


def psi_delta_coeff_bound(k: int, delta) -> float:
    """The classical coefficient bound min(2/(pi k), 2/(pi^2 k^2 delta))."""
    return min(2.0 / (math.pi * k), 2.0 / (math.pi ** 2 * k ** 2 * float(delta)))


def psi_delta_series(p: PsiDelta, x, K: int) -> tuple[float, float]:
    """Truncated Fourier series at x plus the tail bound 4/(pi^2 K delta).

    The series is gamma + sum_{k<=K} (g_k e(kx) + h_k e(-kx)); reality makes
    each term 2*Re(g_k e(kx)).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    g, d = float(p.gamma), float(p.delta)
    ks = np.arange(1, K + 1, dtype=np.float64)
    kernel = np.sin(2 * np.pi * ks * d) / (2 * np.pi * ks * d)
    coeff = np.exp(-1j * np.pi * ks * g) * (np.sin(np.pi * ks * g) / (np.pi * ks)) * kernel
    phases = np.exp(2j * np.pi * ks * float(x))
    value = g + 2.0 * float(np.real(coeff * phases).sum())
    tail = 4.0 / (math.pi ** 2 * K * d)
    return value, tail
