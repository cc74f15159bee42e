"""Beatty sets {floor(alpha*n + beta) : {alpha*n + beta} < c} and floor
sequences of superlinear functions, with membership tests and counting.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np
import sympy
from scipy.integrate import quad

from ._util import chunked
from .errors import FloorUncertified, QuadratureFailure, ValidationFailed
from .irrational import (IrrationalSpec, QuadraticSurd, floor_linear,
                         floor_linear_array, frac_compare, frac_less_array)

_CHUNK = 1 << 20


@dataclass(frozen=True)
class BeattySpec:
    """Parameters (alpha, beta, c) of the thinned Beatty set."""

    alpha: IrrationalSpec
    beta: Fraction = Fraction(0)
    c: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "c", Fraction(self.c))
        if not 0 < self.c <= 1:
            raise ValueError("cutoff c must lie in (0, 1]")

    def full(self) -> "BeattySpec":
        """Same alpha/beta with the cutoff removed (c = 1)."""
        return BeattySpec(self.alpha, self.beta, Fraction(1))


@dataclass
class SequenceWindow:
    """Materialized members of a sequence intersected with [lo, hi)."""

    lo: int
    hi: int
    terms: np.ndarray  # strictly increasing int64
    witnesses: np.ndarray  # n with term = floor(value at n), aligned with terms

    def __len__(self):
        return int(self.terms.size)

    def __contains__(self, m: int) -> bool:
        i = np.searchsorted(self.terms, m)
        return i < self.terms.size and self.terms[i] == m

    def witness(self, m: int) -> int:
        i = np.searchsorted(self.terms, m)
        if i >= self.terms.size or self.terms[i] != m:
            raise KeyError(f"{m} is not a term of this window")
        return int(self.witnesses[i])


def beatty_term(spec: BeattySpec, n: int) -> int:
    """floor(alpha*n + beta)."""
    return floor_linear(spec.alpha, n, spec.beta)


def _beatty_n_range(spec: BeattySpec, lo: int, hi: int) -> tuple[int, int]:
    a = spec.alpha.approx(96)
    b = float(spec.beta)
    n_lo = max(1, int((lo - b - 1) / a) - 2)
    n_hi = int((hi - b) / a) + 3
    return n_lo, n_hi


def _scan_beatty_chunk(args):
    spec, lo, hi, n0, n1 = args
    ns = np.arange(n0, n1, dtype=np.int64)
    terms = floor_linear_array(spec.alpha, ns, spec.beta)
    keep = (terms >= lo) & (terms < hi)
    if spec.c != 1:
        keep &= frac_less_array(spec.alpha, ns, spec.beta, spec.c)
    return terms[keep], ns[keep]


def beatty_window(spec: BeattySpec, lo: int, hi: int, workers: int = 1) -> SequenceWindow:
    """Members of the Beatty set in [lo, hi), each with its witness n.

    The n-range is sharded into fixed chunks; with workers > 1 the chunks are
    sieved in a process pool and merged in order, so results are identical for
    any worker count.
    """
    if not 1 <= lo < hi:
        raise ValueError("need 1 <= lo < hi")
    n0, n1 = _beatty_n_range(spec, lo, hi)
    jobs = [(spec, lo, hi, c0, c1) for c0, c1 in chunked(n0, n1, _CHUNK)]
    if workers > 1 and isinstance(spec.alpha, QuadraticSurd) and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_beatty_chunk, jobs))
    else:
        parts = [_scan_beatty_chunk(job) for job in jobs]
    terms = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, np.int64)
    wits = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, np.int64)
    if terms.size:  # drop duplicate terms (possible only for alpha < 1)
        keep = np.empty(terms.shape, dtype=bool)
        keep[0] = True
        np.not_equal(terms[1:], terms[:-1], out=keep[1:])
        terms, wits = terms[keep], wits[keep]
    return SequenceWindow(lo, hi, terms, wits)


def beatty_membership(spec: BeattySpec, m: int):
    """Decide m in A exactly; returns (is_member, witness_or_None).

    Uses the criterion 0 < {(m - beta + c)/alpha} <= c/alpha, then
    reconstructs the witness and re-verifies the floor (belt and braces
    against precision bugs).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    r = m - spec.beta + spec.c
    if r <= 0:
        return False, None
    alpha = spec.alpha
    if isinstance(alpha, QuadraticSurd):
        inv = alpha.inverse()
        y = inv.mul_rational(r)
        n0 = y.floor()
        # {y} > 0 is automatic (y irrational); {y} <= c/alpha <=> y - c/alpha < n0
        z = inv.mul_rational(m - spec.beta) if m != spec.beta else None
        if z is None:
            ok = False
        else:
            ok = z.cmp_rational(Fraction(n0)) < 0
    else:
        n0 = _enclosure_floor_ratio(alpha, r)
        ok = _enclosure_ratio_below(alpha, m - spec.beta, n0)
    if not ok or n0 < 1:
        return False, None
    if floor_linear(alpha, n0, spec.beta) != m or \
            not frac_compare(alpha, n0, spec.beta, spec.c):
        return False, None
    return True, n0


def _enclosure_floor_ratio(alpha: IrrationalSpec, r: Fraction) -> int:
    """Certified floor(r / alpha) for r > 0."""
    from .errors import PrecisionExhausted
    bits = 64
    while True:
        lo, hi = alpha.enclosure(bits)
        vlo, vhi = r / hi, r / lo
        if math.floor(vlo) == math.floor(vhi):
            return math.floor(vlo)
        if bits >= alpha.precision_budget:
            raise PrecisionExhausted("floor(r/alpha) not certified")
        bits = min(bits * 2, alpha.precision_budget)


def _enclosure_ratio_below(alpha: IrrationalSpec, r: Fraction, n0: int) -> bool:
    """Certified test r/alpha < n0 (r rational, value irrational unless r=0)."""
    from .errors import PrecisionExhausted
    if r == 0:
        return False
    bits = 64
    while True:
        lo, hi = alpha.enclosure(bits)
        vlo, vhi = r / hi, r / lo
        if vhi < n0:
            return True
        if vlo > n0:
            return False
        if bits >= alpha.precision_budget:
            raise PrecisionExhausted("ratio comparison not certified")
        bits = min(bits * 2, alpha.precision_budget)


def beatty_count_ap(spec: BeattySpec, x: int, q: int, a: int,
                    window: bool = False, workers: int = 1) -> int:
    """Count members = a (mod q): up to x, or within [x, 2x) with window=True."""
    if not 0 <= a < q:
        raise ValueError("need 0 <= a < q")
    if q > x:
        raise ValueError("need q <= x")
    w = beatty_window(spec, x, 2 * x, workers) if window \
        else beatty_window(spec, 1, x + 1, workers)
    if q == 1:
        return len(w)
    return int(np.count_nonzero(w.terms % q == a))


# ---------------------------------------------------------------------------
# Leitmann functions

_GAMMA_LO, _GAMMA_HI = Fraction(1), Fraction(12, 11)


class LeitmannFunction:
    """Smooth convex superlinear f with floor-sequence machinery.

    Built-in kinds:

    * ``power``   f(x) = x^G for an exact rational 1 < G < 12/11 (floors are
      computed with exact integer root extraction);
    * ``logpow``  f(x) = x * log(x)^C, C > 0;
    * ``explog``  f(x) = x * exp(C * log(x)^B), C > 0, 0 < B < 1;
    * ``iterlog`` f(x) = x * l_m(x), the m-fold iterated logarithm;
    * ``custom``  caller-supplied callables with declared growth exponents.

    Derivatives of the built-in kinds come from symbolic differentiation.
    """

    def __init__(self, kind: str, params: dict, c0: int, alphas: tuple,
                 f, df, d2f, d3f, inverse=None, gprime=None):
        self.kind = kind
        self.params = params
        self.c0 = c0
        self.alpha1, self.alpha2, self.alpha3 = alphas
        self.f, self.df, self.d2f, self.d3f = f, df, d2f, d3f
        self._inverse = inverse
        self._gprime = gprime
        self._check_alpha_constraints()
        self._check_growth()

    # -- constructors -------------------------------------------------------

    @classmethod
    def power(cls, gamma=Fraction(21, 20), c0: int | None = None) -> "LeitmannFunction":
        if isinstance(gamma, float):
            gamma = Fraction(gamma).limit_denominator(10 ** 6)
        else:
            gamma = Fraction(gamma)
        if not _GAMMA_LO < gamma < _GAMMA_HI:
            raise ValueError(f"power exponent must be in (1, 12/11), got {gamma}")
        g = float(gamma)
        f = lambda x: x ** g
        df = lambda x: g * x ** (g - 1)
        d2f = lambda x: g * (g - 1) * x ** (g - 2)
        d3f = lambda x: g * (g - 1) * (g - 2) * x ** (g - 3)
        inv_exp = 1.0 / g
        inverse = lambda y: y ** inv_exp
        gprime = lambda t: inv_exp * t ** (inv_exp - 1)
        c0 = c0 if c0 is not None else 2
        obj = cls("power", {"gamma": gamma}, c0,
                  (g, g - 1, g - 2), f, df, d2f, d3f, inverse, gprime)
        obj._gamma = gamma
        return obj

    @classmethod
    def _from_expr(cls, kind: str, params: dict, expr, x, c0_min: int) -> "LeitmannFunction":
        d1, d2, d3 = expr.diff(x), expr.diff(x, 2), expr.diff(x, 3)
        fs = [sympy.lambdify(x, e, modules="math") for e in (expr, d1, d2, d3)]
        f_mp = sympy.lambdify(x, expr, modules="mpmath")
        c0 = c0_min
        while fs[0](c0) < 2:
            c0 += 1
        obj = cls(kind, params, c0, (1.0, 0.0, -1.0), *fs)
        obj._f_mp = f_mp
        return obj

    @classmethod
    def logpow(cls, C=1) -> "LeitmannFunction":
        if not C > 0:
            raise ValueError("logpow exponent C must be > 0")
        x = sympy.symbols("x", positive=True)
        return cls._from_expr("logpow", {"C": C}, x * sympy.log(x) ** C, x, 3)

    @classmethod
    def explog(cls, C, B) -> "LeitmannFunction":
        if not (C > 0 and 0 < B < 1):
            raise ValueError("explog needs C > 0 and 0 < B < 1")
        x = sympy.symbols("x", positive=True)
        return cls._from_expr("explog", {"C": C, "B": B},
                              x * sympy.exp(C * sympy.log(x) ** B), x, 2)

    @classmethod
    def iterlog(cls, m: int = 1) -> "LeitmannFunction":
        if m < 1:
            raise ValueError("iterlog depth m must be >= 1")
        x = sympy.symbols("x", positive=True)
        ell = x
        for _ in range(m):
            ell = sympy.log(ell)
        # c0 must keep l_m positive; e^e^... tower plus headroom for f >= 2
        tower = 3
        for _ in range(m - 1):
            tower = math.ceil(math.e ** tower)
        return cls._from_expr("iterlog", {"m": m}, x * ell, x, tower)

    @classmethod
    def custom(cls, f, df, d2f, d3f, inverse, c0: int, alphas: tuple,
               gprime=None) -> "LeitmannFunction":
        return cls("custom", {}, c0, alphas, f, df, d2f, d3f, inverse, gprime)

    # -- constructor-time validation -----------------------------------------

    def _check_alpha_constraints(self):
        a1, a2, a3 = self.alpha1, self.alpha2, self.alpha3
        if not a1 > 0:
            raise ValidationFailed("alpha1 > 0", f"alpha1 = {a1}")
        if a2 < 0:
            raise ValidationFailed("alpha2 >= 0", f"alpha2 = {a2}")
        if a1 == a2:
            raise ValidationFailed("alpha1 != alpha2", f"both {a1}")
        if a3 == 3 * a1:
            raise ValidationFailed("alpha3 != 3*alpha1", f"alpha3 = {a3}")
        if 2 * a1 - 3 * a2 + a3 == 0:
            raise ValidationFailed("2*alpha1 - 3*alpha2 + alpha3 != 0", "sum is 0")

    def _check_growth(self):
        # sampled: f' > 0, f'' > 0, x = o(f(x)), f(x) below the x^{12/11} window
        for x in (self.c0, self.c0 + 7, 10 ** 3, 10 ** 5):
            x = float(x)
            if not self.df(x) > 0:
                raise ValidationFailed("f' > 0", f"f'({x}) = {self.df(x)}")
            if not self.d2f(x) > 0:
                raise ValidationFailed("f'' > 0", f"f''({x}) = {self.d2f(x)}")
        lo, hi = 10.0 ** 4, 10.0 ** 7
        # any admissible kind grows f(x)/x by a visible factor over 3 decades;
        # the identity map (ratio exactly 1) must be rejected
        if not self.f(hi) / hi > 1.001 * self.f(lo) / lo:
            raise ValidationFailed("x = o(f(x))", "f(x)/x is not growing")
        # The x^(12/11) envelope is analytic for the built-in kinds (their
        # parameter windows imply it); the slowly-varying family can exceed
        # it at any sampled scale, so only custom kinds get the trend check.
        if self.kind == "custom":
            if not self.f(hi) / hi ** (12 / 11) < 0.999 * self.f(lo) / lo ** (12 / 11):
                raise ValidationFailed("f(x) << x^(12/11)",
                                       "f(x)/x^(12/11) is not shrinking")

    # -- evaluation -----------------------------------------------------------

    def inverse(self, y: float) -> float:
        """g = f^{-1}, closed form for the power kind, else bisection."""
        if self._inverse is not None:
            return self._inverse(y)
        if y < self.f(self.c0):
            raise ValueError(f"{y} below f(c0)")
        lo, hi = float(self.c0), float(max(self.c0 + 1, y))
        while self.f(hi) < y:
            hi *= 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.f(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)

    def gprime(self, t: float) -> float:
        if self._gprime is not None:
            return self._gprime(t)
        return 1.0 / self.df(self.inverse(t))

    def floor_at(self, n: int) -> int:
        """Certified floor(f(n)).

        Exact integer root extraction for the power kind; otherwise evaluated
        with escalating precision and certified only when f(n) is separated
        from the nearest integer.
        """
        if n < self.c0:
            raise ValueError(f"n = {n} below c0 = {self.c0}")
        if self.kind == "power":
            g = self._gamma
            root, _ = gmpy2.iroot(gmpy2.mpz(n) ** g.numerator, g.denominator)
            return int(root)
        bits = 64
        while bits <= 4096:
            with mpmath.workprec(bits):
                y = self._f_mp(n)
                fl = mpmath.floor(y)
                margin = mpmath.mpf(2) ** (int(mpmath.mag(y)) - bits + 12)
                if y - fl > margin and fl + 1 - y > margin:
                    return int(fl)
            bits *= 2
        raise FloorUncertified(f"f({n}) within 2^-4084 of an integer")


def leitmann_term(f: LeitmannFunction, n: int) -> int:
    return f.floor_at(n)


def leitmann_window(f: LeitmannFunction, lo: int, hi: int) -> SequenceWindow:
    """Terms floor(f(n)) in [lo, hi) with witnesses, duplicates merged."""
    if not f.floor_at(f.c0) <= lo < hi:
        raise ValueError("need floor(f(c0)) <= lo < hi")
    n0 = max(f.c0, int(math.floor(f.inverse(lo))) - 1)
    n1 = int(math.ceil(f.inverse(hi))) + 1
    terms, wits = [], []
    for n in range(n0, n1 + 1):
        t = f.floor_at(n)
        if lo <= t < hi:
            if terms and terms[-1] == t:
                continue
            terms.append(t)
            wits.append(n)
    return SequenceWindow(lo, hi, np.array(terms, dtype=np.int64),
                          np.array(wits, dtype=np.int64))


@dataclass
class LeitmannValidation:
    grid: list[float]
    ratios: dict  # i -> list of x*f^(i)/f^(i-1) along the grid
    declared: tuple[float, float, float]
    final_errors: tuple[float, float, float]
    s_factor: list[float] | None  # x f''/f' samples when alpha2 = 0


def leitmann_validate(f: LeitmannFunction, grid=None,
                      tol: float | None = None) -> LeitmannValidation:
    """Check observed growth ratios x*f^(i)(x)/f^(i-1)(x) against declared
    exponents, raising ValidationFailed naming the violated clause.
    """
    if grid is None:
        grid = [float(f.c0) * 10 ** j for j in range(1, 6)]
    grid = sorted(float(x) for x in grid)
    if grid[0] < f.c0:
        raise ValueError("grid must lie in [c0, inf)")
    derivs = [f.f, f.df, f.d2f, f.d3f]
    declared = (f.alpha1, f.alpha2, f.alpha3)
    ratios = {i: [x * derivs[i](x) / derivs[i - 1](x) for x in grid]
              for i in (1, 2, 3)}
    if tol is None:
        tol = 1e-6 if f.kind == "power" else 0.35
    final_errors = tuple(abs(ratios[i][-1] - declared[i - 1]) for i in (1, 2, 3))
    for i in (1, 2, 3):
        err_first = abs(ratios[i][0] - declared[i - 1])
        err_last = final_errors[i - 1]
        if err_last > tol:
            raise ValidationFailed(
                f"x*f^({i})/f^({i-1}) -> alpha{i}",
                f"|{ratios[i][-1]:.6g} - {declared[i-1]:.6g}| > {tol}")
        if err_last > err_first + 1e-9 + 0.05 * abs(declared[i - 1]):
            raise ValidationFailed(
                f"x*f^({i})/f^({i-1}) -> alpha{i}", "ratio error is not shrinking")
    s_factor = None
    if f.alpha2 == 0:
        s_factor = ratios[2]
        if any(s <= 0 for s in s_factor):
            raise ValidationFailed("s(x) > 0", "x f''/f' not positive on grid")
        if not all(b <= a * 1.02 for a, b in zip(s_factor, s_factor[1:])):
            raise ValidationFailed("s(x) non-increasing", "x f''/f' grew along grid")
    return LeitmannValidation(grid, ratios, declared, final_errors, s_factor)


def leitmann_li(f: LeitmannFunction, c: float, x: float,
                rel_tol: float = 1e-9) -> float:
    """Integral of g'(t)/log(t) over [c, x], the expected count of
    Leitmann primes up to x (before dividing by phi(q)).
    """
    if x < c:
        raise ValueError("need x >= c")
    if x == c:
        return 0.0
    # substitute t = e^u for a gentler integrand on wide ranges
    val, err = quad(lambda u: f.gprime(math.exp(u)) * math.exp(u) / u,
                    math.log(c), math.log(x), epsrel=rel_tol, limit=400)
    if err > max(rel_tol * abs(val) * 10, 1e-12):
        raise QuadratureFailure(f"estimated error {err} for value {val}")
    return val


def parse_leitmann(text: str) -> LeitmannFunction:
    """CLI syntax: power:1.05 | logpow:C | explog:C,B | iterlog:m."""
    kind, _, arg = text.partition(":")
    if kind == "power":
        return LeitmannFunction.power(Fraction(arg) if arg else Fraction(21, 20))
    if kind == "logpow":
        return LeitmannFunction.logpow(float(arg) if arg else 1.0)
    if kind == "explog":
        c, b = (float(t) for t in arg.split(","))
        return LeitmannFunction.explog(c, b)
    if kind == "iterlog":
        return LeitmannFunction.iterlog(int(arg) if arg else 1)
    raise ValueError(f"unknown Leitmann kind {text!r}")
