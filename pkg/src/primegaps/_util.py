"""Small shared helpers: summation, regression, parsing."""

import math
from fractions import Fraction

import numpy as np


def fsum(values) -> float:
    """Exactly rounded sum of floats (stronger than Kahan compensation)."""
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)


def csum(values) -> complex:
    """Compensated complex sum: fsum on real and imaginary parts."""
    if isinstance(values, np.ndarray):
        return complex(fsum(values.real), fsum(values.imag))
    vals = list(values)
    return complex(fsum(v.real for v in vals), fsum(v.imag for v in vals))


def fit_loglog(xs, ys):
    """Least-squares slope of log(y) vs log(x).

    Returns (slope, intercept, residuals) where residuals are per-point
    log-space deviations.  Zero or negative y values are floored at a tiny
    positive value so an exactly-vanishing statistic fits a flat line.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.maximum(np.asarray(ys, dtype=float), 1e-300)
    if len(xs) < 3:
        raise ValueError("need at least 3 ladder points")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    residuals = ly - (slope * lx + intercept)
    return float(slope), float(intercept), residuals.tolist()


def chunked(lo: int, hi: int, size: int):
    """Yield (start, stop) pairs covering [lo, hi) in order."""
    start = lo
    while start < hi:
        stop = min(start + size, hi)
        yield start, stop
        start = stop


def as_fraction(x) -> Fraction:
    """Parse p/q strings, ints, floats-free exact input into Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected exact rational, got {type(x).__name__}")
