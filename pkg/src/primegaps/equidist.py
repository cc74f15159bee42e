"""Discrepancy of finite sequences mod 1, the Erdos-Turan inequality,
exponential sums, and the second-derivative exponential-sum bound.

Discrepancies are taken over half-open intervals [a, b) in [0, 1) without
wraparound.  The extreme discrepancy uses the classical two-max formula on
the sorted sample,

    D_N = max_i (i/N - x_(i))  +  max_i (x_(i) - (i-1)/N),

which the test suite is required to validate against an O(N^2) brute-force
oracle on every corpus instance.
"""

import cmath
import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from ._util import fsum
from .errors import InvalidCurvature, QTooLarge
from .irrational import (IrrationalSpec, QuadraticSurd, estimate_type,
                         frac_values_array)
from .sequences import LeitmannFunction


@dataclass
class UnitSequence:
    """N values in [0, 1) with a provenance tag.

    Values are stored as float64; construction reduces mod 1 at >= 128-bit
    precision (exact integer-part removal plus a high-precision residual),
    so stored fractions are accurate to the last double bit even when the
    unreduced magnitudes are ~1e7.
    """

    values: np.ndarray
    provenance: str = "explicit"
    precision_bits: int = 64
    _exp_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.size < 1:
            raise ValueError("need at least one value")
        if ((self.values < 0) | (self.values >= 1)).any():
            raise ValueError("values must lie in [0, 1)")

    @property
    def n(self) -> int:
        return int(self.values.size)

    @classmethod
    def beatty_multiples(cls, alpha: IrrationalSpec, N: int) -> "UnitSequence":
        """{alpha * n} for n = 1..N."""
        ns = np.arange(1, N + 1, dtype=np.int64)
        return cls(frac_values_array(alpha, ns), "beatty-multiples", 128)

    @classmethod
    def scaled_beatty(cls, alpha: IrrationalSpec, q: int, N: int) -> "UnitSequence":
        """{alpha * n / q} for n = 1..N."""
        ns = np.arange(1, N + 1, dtype=np.int64)
        if isinstance(alpha, QuadraticSurd):
            vals = frac_values_array(alpha.div_int(q), ns)
        else:
            lo, hi = alpha.enclosure(160)
            mid = (lo + hi) / 2
            vals = np.array([float((mid * int(n) / q) % 1) for n in ns])
        return cls(vals, "scaled-beatty", 128)

    @classmethod
    def leitmann(cls, f: LeitmannFunction, q: int, N: int) -> "UnitSequence":
        """{f(n + c0 - 1) / q} for n = 1..N."""
        ns = range(f.c0, f.c0 + N)
        out = np.empty(N, dtype=np.float64)
        if f.kind == "power":
            g = f._gamma
            with gmpy2.context(precision=160):
                ex = gmpy2.mpfr(g.numerator) / g.denominator
                for i, n in enumerate(ns):
                    y = gmpy2.mpfr(n) ** ex
                    # exact integer part: floor(y/q) = floor(y) // q
                    m = int(gmpy2.iroot(gmpy2.mpz(n) ** g.numerator,
                                        g.denominator)[0]) // q
                    out[i] = float(y / q - m)
        else:
            import mpmath
            f_mp = getattr(f, "_f_mp", f.f)
            with mpmath.workprec(160):
                for i, n in enumerate(ns):
                    y = mpmath.mpf(f_mp(n)) / q
                    out[i] = float(y - mpmath.floor(y))
        np.clip(out, 0.0, np.nextafter(1.0, 0.0), out=out)
        return cls(out, "leitmann", 128)


def discrepancy_star(seq: UnitSequence) -> float:
    """Exact star discrepancy over intervals [0, t)."""
    x = np.sort(seq.values)
    N = x.size
    i = np.arange(1, N + 1, dtype=np.float64)
    return float(max((i / N - x).max(), (x - (i - 1) / N).max()))


def discrepancy_extreme(seq: UnitSequence) -> float:
    """Exact extreme discrepancy over intervals [a, b) in [0, 1)."""
    x = np.sort(seq.values)
    N = x.size
    i = np.arange(1, N + 1, dtype=np.float64)
    d_plus = (i / N - x).max()
    d_minus = (x - (i - 1) / N).max()
    return float(d_plus + d_minus)


def exp_sum(seq: UnitSequence, h: int) -> complex:
    """S_h = sum over n of e^(2 pi i h x_n), compensated summation."""
    if h < 1:
        raise ValueError("h must be >= 1")
    cached = seq._exp_cache.get(h)
    if cached is not None:
        return cached
    theta = 2.0 * np.pi * h * seq.values
    s = complex(fsum(np.cos(theta)), fsum(np.sin(theta)))
    seq._exp_cache[h] = s
    return s


def _exp_mags_upto(seq: UnitSequence, m: int) -> np.ndarray:
    """|S_h| for h = 1..m, cached; pairwise summation is plenty here since
    the magnitudes only feed upper bounds with >= 1e-3 headroom."""
    cached = seq._exp_cache.get("mags")
    if cached is None or cached.size < m:
        theta = 2.0 * np.pi * seq.values
        mags = np.empty(m)
        for h in range(1, m + 1):
            ht = h * theta
            mags[h - 1] = abs(complex(np.cos(ht).sum(), np.sin(ht).sum()))
        seq._exp_cache["mags"] = mags
        cached = mags
    return cached[:m]


def erdos_turan_bound(seq: UnitSequence, m: int, C: float | None = None) -> float:
    """Discrepancy bound from the first m exponential sums.

    Default is the explicit-constant variant
        6/(m+1) + (4/pi) * sum_{h<=m} |S_h| / (h N);
    passing C switches to the shape C * (1/m + sum_{h<=m} |S_h| / (h N))
    for sensitivity runs.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    N = seq.n
    mags = _exp_mags_upto(seq, m)
    weighted = float((mags / (N * np.arange(1.0, m + 1))).sum())
    if C is None:
        return 6.0 / (m + 1) + (4.0 / math.pi) * weighted
    return C * (1.0 / m + weighted)


def erdos_turan_best(seq: UnitSequence, m_values) -> tuple[int, float]:
    """(m, bound) minimizing the default bound over the supplied m range."""
    best = None
    for m in m_values:
        b = erdos_turan_bound(seq, m)
        if best is None or b < best[1]:
            best = (m, b)
    if best is None:
        raise ValueError("empty m range")
    return best


# ---------------------------------------------------------------------------
# exponential-sum bound for curved phases

@dataclass(frozen=True)
class PhaseFunction:
    """Real phase with first and second derivatives, for n in [a, b]."""

    f: callable
    df: callable
    d2f: callable
    label: str = "phase"


def leitmann_phase(f: LeitmannFunction, h: int, q: int) -> PhaseFunction:
    """Phase (h/q) * f(x), the object bounded in the scaled-sequence argument."""
    s = h / q
    return PhaseFunction(lambda x: s * f.f(x), lambda x: s * f.df(x),
                         lambda x: s * f.d2f(x), f"{h}/{q}*f")


def curvature_floor(phase: PhaseFunction, a: int, b: int,
                    samples: int = 33) -> float:
    """Lower bound for |f''| on [a, b] by monotone endpoint probing.

    The built-in phases have monotone f'', so min(|f''(a)|, |f''(b)|) is the
    infimum; interior samples guard against non-monotone custom phases.
    """
    xs = np.linspace(a, b, samples)
    vals = np.abs([phase.d2f(float(x)) for x in xs])
    return float(vals.min())


def vdc_bound(phase: PhaseFunction, a: int, b: int, rho: float,
              samples: int = 33) -> float:
    """(|f'(b) - f'(a)| + 2) * (4/sqrt(rho) + 3), after verifying that rho
    really is a lower bound for |f''| at the probe points."""
    if a >= b:
        raise ValueError("need a < b")
    if rho <= 0:
        raise InvalidCurvature("rho must be positive")
    xs = np.linspace(a, b, samples)
    d2 = np.array([phase.d2f(float(x)) for x in xs])
    if np.abs(d2).min() < rho or (d2.max() > 0 > d2.min()):
        raise InvalidCurvature(
            f"|f''| dips below rho = {rho} (min {np.abs(d2).min():.3g}) "
            "or changes sign on the range")
    return (abs(phase.df(b) - phase.df(a)) + 2.0) * (4.0 / math.sqrt(rho) + 3.0)


def vdc_check(phase: PhaseFunction, a: int, b: int, rho: float):
    """Exact |sum_{n=a}^{b} e^(2 pi i f(n))| compared against the bound."""
    bound = vdc_bound(phase, a, b, rho)
    terms = [cmath.exp(2j * math.pi * (phase.f(n) % 1.0)) for n in range(a, b + 1)]
    mag = abs(complex(fsum(t.real for t in terms), fsum(t.imag for t in terms)))
    return mag, bound, mag <= bound


# ---------------------------------------------------------------------------
# discrepancy reports for the scaled sequences

@dataclass
class DiscrepancyReport:
    n: int
    q: int
    d_star: float
    d_extreme: float
    et_bound: float
    et_m: int
    envelope: float | None = None
    q_too_large: bool = False
    provenance: str = ""


_ET_M_GRID = (8, 32, 128, 512)


def _et_fields(seq: UnitSequence, m_values) -> tuple[int, float]:
    return erdos_turan_best(seq, m_values)


def scaled_beatty_discrepancy(alpha: IrrationalSpec, q: int, N: int,
                              eps: float = 0.05, type_depth: int = 30,
                              m_values=_ET_M_GRID) -> DiscrepancyReport:
    """Exact discrepancy of {alpha*n/q : n <= N} with the (N/q)^(-1/tau)
    envelope attached; flags q as too large once q exceeds sqrt(N)."""
    if not 1 <= q < N:
        raise ValueError("need 1 <= q < N")
    seq = UnitSequence.scaled_beatty(alpha, q, N)
    tau = estimate_type(alpha, type_depth).tau_hat
    envelope = (N / q) ** (-1.0 / tau + eps)
    et_m, et_bound = _et_fields(seq, m_values)
    return DiscrepancyReport(N, q, discrepancy_star(seq), discrepancy_extreme(seq),
                             et_bound, et_m, envelope, q_too_large=q * q > N,
                             provenance=seq.provenance)


def leitmann_discrepancy(f: LeitmannFunction, q: int, N: int,
                         m_values=_ET_M_GRID) -> DiscrepancyReport:
    """Exact discrepancy of {f(n + c0 - 1)/q : n <= N} with the envelope
    N^(-1/11) + sqrt(q) * N^(-23/22)."""
    q_cap = math.ceil(N ** (1.0 / 11.0))
    if q > q_cap:
        raise QTooLarge(f"q = {q} exceeds ceil(N^(1/11)) = {q_cap}")
    if q < 1:
        raise ValueError("q must be >= 1")
    seq = UnitSequence.leitmann(f, q, N)
    envelope = N ** (-1.0 / 11.0) + math.sqrt(q) * N ** (-23.0 / 22.0)
    et_m, et_bound = _et_fields(seq, m_values)
    return DiscrepancyReport(N, q, discrepancy_star(seq), discrepancy_extreme(seq),
                             et_bound, et_m, envelope,
                             provenance=seq.provenance)
