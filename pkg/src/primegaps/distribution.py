"""Empirical distribution experiments: well-distribution of the Beatty set
in progressions, weighted prime sums with their smoothed decomposition,
twisted von Mangoldt sums, and the cluster searches behind the bounded-gap
statements.

All error budgets in the source theory carry (log x)^A normalizers that are
vacuous at desk scale; reports therefore expose raw totals, ratios against
natural normalizers, and fitted log-log slopes across x ladders.
"""

import math
from dataclasses import dataclass

import numpy as np
import sympy

from ._util import chunked, fit_loglog, fsum
from .errors import CapacityExceeded, NotCoprime
from .irrational import (IrrationalSpec, QuadraticSurd, estimate_type,
                         floor_linear_array, frac_less_array, frac_values_array)
from .sequences import BeattySpec, LeitmannFunction, beatty_membership, \
    beatty_window, leitmann_li, leitmann_window
from .sieve import PrimeTable, chebyshev_sum, euler_phi
from .smoothing import PsiDelta, psi_delta_eval_array, psi_delta_fourier
from .tuples import LinearFormTuple, diameter

_SCAN_CHUNK = 1 << 20


@dataclass
class HypothesisReport:
    """Per-modulus worst-class errors for one distribution sum."""

    part: int
    x: int
    theta: float
    q_max: int
    rows: list  # (q, max_error) pairs
    total: float
    normalizer_name: str
    normalizer: float

    @property
    def ratio(self) -> float:
        return self.total / self.normalizer if self.normalizer else math.inf


@dataclass
class ConcentrationReport:
    x: int
    theta: float
    q_max: int
    ratio: float
    worst_q: int
    worst_a: int


@dataclass
class ClusterReport:
    shifts: tuple[int, ...]
    x_lo: int
    x_hi: int
    m: int
    count: int
    exemplars: list  # dicts {n, primes}
    diameter: int
    scanned: int


def default_theta(alpha: IrrationalSpec, depth: int = 30) -> float:
    """min(1/(2*tau_hat) - 0.01, 0.45), the safe window for parts 1 and 3."""
    tau = estimate_type(alpha, depth).tau_hat
    return min(0.5 / tau - 0.01, 0.45)


def _window_members(spec: BeattySpec, x: int, workers: int = 1) -> np.ndarray:
    return beatty_window(spec, x, 2 * x, workers=workers).terms


def hyp1_part1(spec: BeattySpec, x: int, theta: float | None = None,
               workers: int = 1) -> HypothesisReport:
    """Sum over q <= x^theta of max_a |#A(x;q,a) - #A(x)/q| on [x, 2x)."""
    if theta is None:
        theta = default_theta(spec.alpha)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    members = _window_members(spec, x, workers)
    total_members = members.size
    q_max = max(1, int(x ** theta))
    rows = []
    total = 0.0
    for q in range(1, q_max + 1):
        if q == 1:
            rows.append((1, 0.0))
            continue
        counts = np.bincount(members % q, minlength=q)
        err = float(np.abs(counts - total_members / q).max())
        rows.append((q, err))
        total += err
    return HypothesisReport(1, x, theta, q_max, rows, total,
                            "#A(x)", float(total_members))


def hyp1_part2(spec: BeattySpec, table: PrimeTable, shift: int, x: int,
               theta: float = 0.2, workers: int = 1) -> HypothesisReport:
    """Sum over q <= x^theta of the worst coprime-class error for primes
    among the shifted members n + shift, n in A(x)."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    if 2 * x + shift > table.limit:
        raise CapacityExceeded(f"need primes to {2 * x + shift} > {table.limit}")
    members = _window_members(spec, x, workers)
    prime_mask = table.is_prime_array(members + shift)
    prime_members = members[prime_mask]
    total_primes = prime_members.size
    q_max = max(1, int(x ** theta))
    rows = []
    total = 0.0
    for q in range(1, q_max + 1):
        if q == 1:
            rows.append((1, 0.0))
            continue
        counts = np.bincount(prime_members % q, minlength=q)
        expect = total_primes / euler_phi(q)
        err = 0.0
        for a in range(q):
            if math.gcd(a + shift, q) == 1:
                err = max(err, abs(float(counts[a]) - expect))
        rows.append((q, err))
        total += err
    return HypothesisReport(2, x, theta, q_max, rows, total,
                            "#P_{L,A}(x)", float(total_primes))


def hyp1_part3(spec: BeattySpec, x: int, theta: float,
               workers: int = 1) -> ConcentrationReport:
    """max over q <= x^theta and all a of q * #A(x;q,a) / #A(x)."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    members = _window_members(spec, x, workers)
    total_members = members.size
    q_max = max(1, int(x ** theta))
    best = (1.0, 1, 0)
    for q in range(1, q_max + 1):
        counts = np.bincount(members % q, minlength=q)
        a = int(counts.argmax())
        ratio = q * float(counts[a]) / total_members
        if ratio > best[0]:
            best = (ratio, q, a)
    return ConcentrationReport(x, theta, q_max, best[0], best[1], best[2])


# ---------------------------------------------------------------------------
# weighted prime sums over the Beatty set

@dataclass
class LambdaDecomposition:
    delta: float
    k_split: int
    gamma_term: float
    twisted_partial: float
    tail_bound: float
    v_count: int          # all m <= M in the exceptional set
    v_count_weighted: int  # prime powers only (what the Lambda weight sees)
    smoothed_direct: float
    residual_smoothing: float  # S - smoothed_direct
    residual_fourier: float    # smoothed_direct - gamma_term - twisted_partial


@dataclass
class LambdaSumReport:
    N: int
    M: int
    q: int
    a: int
    S: float
    main_term: float
    error: float
    rel_error: float
    decomposition: LambdaDecomposition | None = None


def _lambda_lookup(table: PrimeTable, ms: np.ndarray) -> np.ndarray:
    """Lambda(m) for an int64 array via the table's prime-power list."""
    vals, logs = table.prime_powers()
    idx = np.searchsorted(vals, ms)
    idx = np.minimum(idx, vals.size - 1)
    hit = vals[idx] == ms
    out = np.zeros(ms.shape, dtype=np.float64)
    out[hit] = logs[idx[hit]]
    return out


def lambda_beatty_sum(spec: BeattySpec, table: PrimeTable, N: int, q: int, a: int,
                      delta: float | None = None, eps: float = 0.1,
                      k_split: int | None = None,
                      decompose: bool = False) -> LambdaSumReport:
    """S = sum of Lambda(floor(alpha n + beta)) over n <= N with the member
    criterion and congruence filter, against the main term
    c/alpha * sum_{m <= M, m = a (q)} Lambda(m).

    With decompose=True the smoothed-indicator pieces are evaluated as well:
    the constant gamma term, the twisted sums below the k-split, the Fourier
    tail bound, and the exceptional counts near the trapezoid ramps.
    """
    if math.gcd(a, q) != 1:
        raise NotCoprime(f"gcd({a}, {q}) != 1")
    alpha = spec.alpha
    M = int(floor_linear_array(alpha, np.array([N], dtype=np.int64), spec.beta)[0])
    if M > table.limit:
        raise CapacityExceeded(f"M = {M} exceeds table limit {table.limit}")

    s_parts = []
    for lo, hi in chunked(1, N + 1, _SCAN_CHUNK):
        ns = np.arange(lo, hi, dtype=np.int64)
        ms = floor_linear_array(alpha, ns, spec.beta)
        keep = frac_less_array(alpha, ns, spec.beta, spec.c)
        keep &= ms % q == a
        ms = ms[keep]
        if ms.size:
            s_parts.append(_lambda_lookup(table, ms))
    S = fsum(np.concatenate(s_parts)) if s_parts else 0.0

    cheb = chebyshev_sum(table, M, q, a if q > 1 else 0)
    inv = alpha.inverse() if isinstance(alpha, QuadraticSurd) else None
    if inv is not None:
        gamma_exact = inv.mul_rational(spec.c)
        gamma = gamma_exact.approx(128)
    else:
        gamma = float(spec.c) / alpha.approx(128)
    main = gamma * cheb
    err = S - main
    rel = abs(err) / main if main else math.inf

    dec = None
    if decompose:
        if delta is None:
            delta = min(N ** -0.25, 0.124, float(min(gamma, 1 - gamma)) / 2 * 0.999)
        if k_split is None:
            k_split = max(1, math.ceil(M ** eps))
        dec = _decompose(spec, table, N, M, q, a, gamma, delta, k_split, S, cheb)
    return LambdaSumReport(N, M, q, a, S, main, err, rel, dec)


def _decompose(spec: BeattySpec, table: PrimeTable, N, M, q, a, gamma, delta,
               k_split, S, cheb) -> LambdaDecomposition:
    alpha = spec.alpha
    if not isinstance(alpha, QuadraticSurd):
        raise ValueError("decomposition requires an exact surd alpha")
    inv = alpha.inverse()
    # shift delta_0 = (c - beta)/alpha enters the smoothed argument
    shift = inv.mul_rational(spec.c - spec.beta) if spec.c != spec.beta else None
    shift_val = shift.approx(128) % 1.0 if shift is not None else 0.0

    vals, logs = table.prime_powers()
    cut = np.searchsorted(vals, M, side="right")
    vals, logs = vals[:cut], logs[:cut]
    if q > 1:
        mask = vals % q == a
        vals, logs = vals[mask], logs[mask]
    # {m/alpha} for the prime powers in the class, exactly floored
    u = frac_values_array(inv, vals) if vals.size else np.zeros(0)
    args = np.mod(u + shift_val, 1.0)

    p = PsiDelta(gamma, delta)
    smoothed = fsum(logs * psi_delta_eval_array(p, args))

    gamma_term = gamma * cheb
    twisted = 0.0
    for k in range(1, k_split + 1):
        gk, hk = psi_delta_fourier(p, k)
        phase = np.exp(2j * np.pi * k * u)
        Tk = complex(fsum(logs * phase.real), fsum(logs * phase.imag))
        ek = np.exp(2j * np.pi * k * shift_val)
        twisted += (gk * ek * Tk + hk * np.conj(ek) * np.conj(Tk)).real
    tail_bound = 4.0 / (math.pi ** 2 * k_split * delta) * cheb

    # exceptional set: within delta of the ramps
    lo1, hi1 = delta, gamma - delta
    lo2, hi2 = gamma + delta, 1 - delta
    in_ramp = ~(((args >= lo1) & (args <= hi1)) | ((args >= lo2) & (args <= hi2)))
    v_weighted = int(np.count_nonzero(in_ramp))
    # paper-style V(I, M) counts every m <= M in the class, not just
    # prime powers; float64 phases are ample for a ramp-width count
    all_m = np.arange(a if a >= 1 else q, M + 1, q, dtype=np.int64)
    inv_f = inv.approx(128)
    args_all = np.mod(all_m * inv_f + shift_val, 1.0)
    in_ramp_all = ~(((args_all >= lo1) & (args_all <= hi1))
                    | ((args_all >= lo2) & (args_all <= hi2)))
    v_count = int(np.count_nonzero(in_ramp_all))

    return LambdaDecomposition(delta, k_split, gamma_term, twisted, tail_bound,
                               v_count, v_weighted, smoothed,
                               S - smoothed, smoothed - gamma_term - twisted)


def twisted_lambda_sum(table: PrimeTable, M: int, q: int, a: int,
                       gamma: IrrationalSpec, k: int) -> float:
    """|sum over m <= M, m = a (q) of Lambda(m) e(gamma k m)|.

    gamma must be an irrational spec; rational gamma degenerates to a plain
    Chebyshev sum and is rejected.
    """
    if not isinstance(gamma, IrrationalSpec):
        raise ValueError("gamma must be an IrrationalSpec (rational inputs degenerate)")
    if not 0 <= a < q:
        raise ValueError("need 0 <= a < q")
    if M > table.limit:
        raise CapacityExceeded(f"M = {M} exceeds table limit {table.limit}")
    if k < 1:
        raise ValueError("k must be >= 1")
    vals, logs = table.prime_powers()
    cut = np.searchsorted(vals, M, side="right")
    vals, logs = vals[:cut], logs[:cut]
    if q > 1:
        mask = vals % q == a
        vals, logs = vals[mask], logs[mask]
    if vals.size == 0:
        return 0.0
    g = gamma.mul_rational(k) if isinstance(gamma, QuadraticSurd) else None
    if g is not None:
        fr = frac_values_array(g, vals)
    else:
        fr = np.mod(vals * (gamma.approx(160) * k), 1.0)
    phase = np.exp(2j * np.pi * fr)
    return abs(complex(fsum(logs * phase.real), fsum(logs * phase.imag)))


def twisted_lambda_ladder(table: PrimeTable, Ms, q: int, a: int,
                          gamma: IrrationalSpec, k: int):
    """Fitted eta_hat with |sum| modeled as M^(1 - eta)."""
    mags = [twisted_lambda_sum(table, M, q, a, gamma, k) for M in Ms]
    slope, _, residuals = fit_loglog(Ms, mags)
    return {"Ms": list(Ms), "magnitudes": mags, "eta_hat": 1.0 - slope,
            "slope": slope, "residuals": residuals}


# ---------------------------------------------------------------------------
# cluster searches

_EXEMPLAR_CAP = 100


def cluster_search(spec: BeattySpec, table: PrimeTable, t: LinearFormTuple,
                   x: int, m: int, workers: int = 1) -> ClusterReport:
    """Count n in A(x) = A intersect [x, 2x) with >= m primes among n + l_i.

    Exemplars (capped) are re-verified with an independent primality test
    and the membership criterion; the full count is exact either way.
    """
    top = 2 * x + t.shifts[-1]
    if top > table.limit:
        raise CapacityExceeded(f"need primes to {top} > table limit {table.limit}")
    members = _window_members(spec, x, workers)
    hits = np.zeros(members.size, dtype=np.int64)
    for l in t.shifts:
        hits += table.is_prime_array(members + l)
    qualifying = members[hits >= m]
    exemplars = []
    for n in qualifying[:_EXEMPLAR_CAP].tolist():
        primes = [int(n + l) for l in t.shifts if table.is_prime(n + l)]
        if not all(sympy.isprime(p) for p in primes):
            raise AssertionError(f"sieve/primality mismatch at n = {n}")
        if not beatty_membership(spec, n)[0]:
            raise AssertionError(f"window member {n} fails the membership criterion")
        exemplars.append({"n": int(n), "primes": primes})
    return ClusterReport(t.shifts, x, 2 * x, m, int(qualifying.size),
                         exemplars, diameter(t), int(members.size))


def leitmann_interval_search(f: LeitmannFunction, table: PrimeTable,
                             x_lo: int, x_hi: int, m: int,
                             window: int) -> ClusterReport:
    """Report Leitmann terms t in [x_lo, x_hi) whose window [t, t + window]
    holds at least m primes."""
    if x_hi + window > table.limit:
        raise CapacityExceeded("window end beyond table limit")
    terms = leitmann_window(f, x_lo, x_hi).terms
    ps = table.primes()
    lo_idx = np.searchsorted(ps, terms, side="left")
    hi_idx = np.searchsorted(ps, terms + window, side="right")
    counts = hi_idx - lo_idx
    qualifying = terms[counts >= m]
    exemplars = []
    for t0 in qualifying[:_EXEMPLAR_CAP].tolist():
        primes = [int(p) for p in ps[np.searchsorted(ps, t0, side="left"):
                                     np.searchsorted(ps, t0 + window, side="right")]]
        if not all(sympy.isprime(p) for p in primes):
            raise AssertionError(f"primality mismatch near {t0}")
        exemplars.append({"n": int(t0), "primes": primes})
    return ClusterReport((0,), x_lo, x_hi, m, int(qualifying.size), exemplars,
                         window, int(terms.size))


@dataclass
class LeitmannPNTReport:
    x: int
    q_max: int
    pi_f: int
    li: float
    rel_error: float
    rows: list  # (q, max coprime-class error)
    total: float


def leitmann_pnt_check(f: LeitmannFunction, table: PrimeTable, x: int,
                       q_max: int = 1) -> LeitmannPNTReport:
    """Compare prime counts in the floor sequence against the inverse-
    function logarithmic integral, per residue class."""
    if x > table.limit:
        raise CapacityExceeded(f"x = {x} exceeds table limit")
    first = f.floor_at(f.c0)
    terms = leitmann_window(f, max(2, first), x + 1).terms
    prime_terms = terms[table.is_prime_array(terms)]
    pi_f = int(prime_terms.size)
    li = leitmann_li(f, f.f(f.c0), x)
    rows = []
    total = 0.0
    for q in range(1, q_max + 1):
        phi_q = euler_phi(q)
        expect = li / phi_q
        counts = np.bincount(prime_terms % q, minlength=q)
        err = 0.0
        for a in range(q):
            if math.gcd(a, q) == 1:
                err = max(err, abs(float(counts[a]) - expect))
        rows.append((q, err))
        total += err
    return LeitmannPNTReport(x, q_max, pi_f, li, abs(pi_f - li) / li, rows, total)


# ---------------------------------------------------------------------------
# ladders

@dataclass
class LadderReport:
    points: list
    values: list
    slope: float
    intercept: float
    residuals: list


def ladder(points, runner) -> LadderReport:
    """Run `runner(x)` over >= 3 ladder points and fit log(value) vs log(x)."""
    points = list(points)
    if len(points) < 3:
        raise ValueError("need at least 3 ladder points")
    values = [float(runner(x)) for x in points]
    slope, intercept, residuals = fit_loglog(points, values)
    return LadderReport(points, values, slope, intercept, residuals)
