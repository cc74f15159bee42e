"""Exact and certified arithmetic for irrational numbers.

Three representations are supported:

* quadratic surds (a + b*sqrt(d))/e -- every query (floor, fractional-part
  comparison, continued fraction) is decided with exact integer arithmetic,
  so there is no precision budget to exhaust;
* named transcendental constants (pi, e) -- answers are certified by
  interval enclosures whose precision doubles up to a budget;
* explicit partial-quotient streams -- the value is pinned between
  consecutive convergents, again giving exact rational enclosures.

Floors and comparisons returned by this module are exact statements about
the represented real number, never roundings of it.
"""

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np

from .errors import PrecisionExhausted

DEFAULT_PRECISION_BUDGET = 16384
_START_BITS = 64

# int64 headroom for the vectorized exact-floor kernel
_I64_SAFE = 1 << 60


def _is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _floor_surd_parts(A: int, B: int, d: int, E: int) -> int:
    """Exact floor((A + B*sqrt(d))/E) for integers with E > 0."""
    if B == 0:
        return A // E
    if B > 0:
        t = math.isqrt(B * B * d)
    else:
        # B*sqrt(d) is irrational and negative: floor = -isqrt(B^2 d) - 1
        t = -math.isqrt(B * B * d) - 1
    return (A + t) // E


def _surd_less_rational(A: int, B: int, d: int, E: int, num: int, den: int) -> bool:
    """Exact test (A + B*sqrt(d))/E < num/den, with E > 0, den > 0.

    Equality cannot occur when B != 0 (the left side is irrational).
    """
    # (A + B sqrt(d)) * den < num * E   <=>   v*sqrt(d) < u
    u = num * E - A * den
    v = B * den
    if v == 0:
        return 0 < u
    if v > 0:
        # v*sqrt(d) < u  <=>  u > 0 and isqrt(v^2 d) < u
        return u > 0 and math.isqrt(v * v * d) < u
    # -|v|*sqrt(d) < u  <=>  u >= 0 or |v|*sqrt(d) > -u
    return u >= 0 or math.isqrt(v * v * d) >= -u


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    man, exp = int(man), int(exp)  # mpmath's gmpy2 backend hands back mpz
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


class IrrationalSpec:
    """Base class. Subclasses certify floors/comparisons for one real number."""

    precision_budget: int = DEFAULT_PRECISION_BUDGET
    is_exact = False

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Exact rational interval (lo, hi) containing the value, width <= 2^-bits."""
        raise NotImplementedError

    def partial_quotient_iter(self):
        raise NotImplementedError

    def approx(self, bits: int = 64) -> float:
        lo, hi = self.enclosure(bits)
        return float((lo + hi) / 2)

    def to_text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class QuadraticSurd(IrrationalSpec):
    """(a + b*sqrt(d))/e with d >= 2 nonsquare and b != 0."""

    a: int
    b: int
    d: int
    e: int = 1
    precision_budget: int = DEFAULT_PRECISION_BUDGET
    is_exact = True

    def __post_init__(self):
        if self.e == 0:
            raise ValueError("denominator e must be nonzero")
        if self.b == 0:
            raise ValueError("b = 0 would make the value rational")
        if self.d < 2 or _is_perfect_square(self.d):
            raise ValueError("d must be a nonsquare integer >= 2")
        a, b, e = self.a, self.b, self.e
        if e < 0:
            a, b, e = -a, -b, -e
        g = math.gcd(math.gcd(abs(a), abs(b)), e)
        if g > 1:
            a, b, e = a // g, b // g, e // g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "e", e)

    # -- exact scalar operations -------------------------------------------

    def floor(self) -> int:
        return _floor_surd_parts(self.a, self.b, self.d, self.e)

    def _linear_parts(self, beta: Fraction):
        """Coefficients (A0, A1, B1, E) with value(n) = (A0 + A1*n + B1*n*sqrt(d))/E."""
        p, q = beta.numerator, beta.denominator
        return p * self.e, self.a * q, self.b * q, self.e * q

    def floor_linear(self, n: int, beta: Fraction = Fraction(0)) -> int:
        A0, A1, B1, E = self._linear_parts(beta)
        return _floor_surd_parts(A0 + A1 * n, B1 * n, self.d, E)

    def frac_less(self, n: int, beta: Fraction, c: Fraction) -> bool:
        """Exact test {alpha*n + beta} < c."""
        A0, A1, B1, E = self._linear_parts(beta)
        A, B = A0 + A1 * n, B1 * n
        m = _floor_surd_parts(A, B, self.d, E)
        bound = m + c
        return _surd_less_rational(A, B, self.d, E, bound.numerator, bound.denominator)

    def cmp_rational(self, r: Fraction) -> int:
        """Sign of (value - r); never 0 since the value is irrational."""
        r = Fraction(r)
        return -1 if _surd_less_rational(self.a, self.b, self.d, self.e,
                                         r.numerator, r.denominator) else 1

    # -- exact field arithmetic (stays inside Q(sqrt(d))) ------------------

    def add_rational(self, r) -> "QuadraticSurd":
        r = Fraction(r)
        return QuadraticSurd(self.a * r.denominator + r.numerator * self.e,
                             self.b * r.denominator, self.d,
                             self.e * r.denominator, self.precision_budget)

    def mul_rational(self, r) -> "QuadraticSurd":
        r = Fraction(r)
        if r == 0:
            raise ValueError("multiplying by zero leaves no irrational part")
        return QuadraticSurd(self.a * r.numerator, self.b * r.numerator, self.d,
                             self.e * r.denominator, self.precision_budget)

    def div_int(self, q: int) -> "QuadraticSurd":
        return self.mul_rational(Fraction(1, q))

    def inverse(self) -> "QuadraticSurd":
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadraticSurd(self.e * self.a, -self.e * self.b, self.d, norm,
                             self.precision_budget)

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        scale = 1 << (bits + 8)
        s = math.isqrt(self.d * scale * scale)
        slo, shi = Fraction(s, scale), Fraction(s + 1, scale)
        if self.b >= 0:
            lo = (self.a + self.b * slo) / self.e
            hi = (self.a + self.b * shi) / self.e
        else:
            lo = (self.a + self.b * shi) / self.e
            hi = (self.a + self.b * slo) / self.e
        return lo, hi

    def approx(self, bits: int = 64) -> float:
        with gmpy2.context(precision=bits):
            return float((self.a + self.b * gmpy2.sqrt(gmpy2.mpz(self.d))) / self.e)

    def partial_quotient_iter(self):
        cur = self
        while True:
            a = cur.floor()
            yield a
            cur = cur.add_rational(-a).inverse()

    def to_text(self) -> str:
        return f"surd:({self.a}+{self.b}*sqrt({self.d}))/{self.e}"


class NamedConstant(IrrationalSpec):
    """pi or e, backed by mpmath's arbitrary-precision constants."""

    _SUPPORTED = ("pi", "e")

    def __init__(self, name: str, precision_budget: int = DEFAULT_PRECISION_BUDGET):
        if name not in self._SUPPORTED:
            raise ValueError(f"unsupported constant {name!r}")
        self.name = name
        self.precision_budget = precision_budget
        self._cache: dict[int, tuple[Fraction, Fraction]] = {}
        self._lock = threading.Lock()

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        with self._lock:
            hit = self._cache.get(bits)
            if hit is not None:
                return hit
            with mpmath.workprec(bits + 16):
                v = _mpf_to_fraction(+getattr(mpmath, self.name))
            # mpmath constants are accurate to ~1 ulp at working precision;
            # pad by 2^-(bits+4) on both sides to get a safe enclosure.
            pad = Fraction(1, 1 << (bits + 4))
            enc = (v - pad, v + pad)
            self._cache[bits] = enc
            return enc

    def partial_quotient_iter(self):
        return _enclosure_pq_iter(self)

    def to_text(self) -> str:
        return self.name

    def __reduce__(self):
        return (NamedConstant, (self.name, self.precision_budget))


class PartialQuotientIrrational(IrrationalSpec):
    """Value given by an explicit (infinite) stream of partial quotients."""

    def __init__(self, quotients, precision_budget: int = DEFAULT_PRECISION_BUDGET):
        self._source = iter(quotients)
        self.precision_budget = precision_budget
        self._memo: list[int] = []
        # convergent numerators/denominators aligned with _memo
        self._p: list[int] = [1]
        self._q: list[int] = [0]
        self._lock = threading.Lock()

    def _extend(self, count: int):
        while len(self._memo) < count:
            try:
                a = int(next(self._source))
            except StopIteration:
                raise ValueError("partial-quotient stream ended: value would be rational")
            k = len(self._memo)
            if k >= 1 and a < 1:
                raise ValueError(f"partial quotient a_{k} = {a} must be >= 1")
            self._memo.append(a)
            if k == 0:
                self._p.append(a)
                self._q.append(1)
            else:
                self._p.append(a * self._p[-1] + self._p[-2])
                self._q.append(a * self._q[-1] + self._q[-2])

    def prefix(self, count: int) -> list[int]:
        with self._lock:
            self._extend(count)
            return self._memo[:count]

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        target = 1 << bits
        with self._lock:
            k = len(self._memo)
            while k < 2 or self._q[-1] * self._q[-2] < target:
                if self._q[-1] > (1 << self.precision_budget):
                    raise PrecisionExhausted(
                        f"convergent denominators exceed 2^{self.precision_budget}")
                self._extend(len(self._memo) + 1)
                k = len(self._memo)
            lo = Fraction(self._p[-1], self._q[-1])
            hi = Fraction(self._p[-2], self._q[-2])
        return (lo, hi) if lo < hi else (hi, lo)

    def partial_quotient_iter(self):
        k = 0
        while True:
            yield self.prefix(k + 1)[k]
            k += 1

    def to_text(self) -> str:
        return "cf:<stream>"


def quadratic_from_cf(prefix: list[int], period: list[int],
                      precision_budget: int = DEFAULT_PRECISION_BUDGET) -> QuadraticSurd:
    """Exact value of an eventually periodic continued fraction.

    [prefix ; period repeating] is a quadratic irrational; the returned surd
    represents it exactly.
    """
    if not period:
        raise ValueError("periodic tail must be nonempty (finite CF is rational)")
    if any(a < 1 for a in period) or any(a < 1 for a in prefix[1:]):
        raise ValueError("partial quotients after a_0 must be >= 1")
    # y = purely periodic value: y = (p1*y + p0) / (q1*y + q0)
    p0, p1 = 1, period[0]
    q0, q1 = 0, 1
    for a in period[1:]:
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    # q1*y^2 + (q0 - p1)*y - p0 = 0, positive root (> 1)
    disc = (q0 - p1) ** 2 + 4 * q1 * p0
    if _is_perfect_square(disc):
        raise ValueError("degenerate period: value is rational")
    g, h, D = p1 - q0, 2 * q1, disc  # y = (g + sqrt(D)) / h
    # apply the prefix Moebius transform x = (P1*y + P0)/(Q1*y + Q0)
    P0, P1 = 0, 1
    Q0, Q1 = 1, 0
    for a in prefix:
        P0, P1 = P1, a * P1 + P0
        Q0, Q1 = Q1, a * Q1 + Q0
    # numerator: (P1*g + P0*h) + P1*sqrt(D); denominator likewise
    N0, N1 = P1 * g + P0 * h, P1
    M0, M1 = Q1 * g + Q0 * h, Q1
    E = M0 * M0 - M1 * M1 * D
    A = N0 * M0 - N1 * M1 * D
    B = N1 * M0 - N0 * M1
    if B == 0:
        raise ValueError("continued fraction reduces to a rational")
    return QuadraticSurd(A, B, D, E, precision_budget)


_SURD_RE = re.compile(
    r"^surd:\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(-?\d+)$")
_CF_RE = re.compile(r"^cf:\[\s*(-?\d+)\s*(?:;(.*))?\]$")


def parse_irrational(text: str,
                     precision_budget: int = DEFAULT_PRECISION_BUDGET) -> IrrationalSpec:
    """Parse the textual spec syntax.

    surd:(a+b*sqrt(d))/e     exact quadratic surd
    pi | e                   named constant
    cf:[a0;a1,a2,(p1,p2)]    finite prefix plus periodic tail (exact surd)
    """
    text = text.strip()
    if text in NamedConstant._SUPPORTED:
        return NamedConstant(text, precision_budget)
    m = _SURD_RE.match(text)
    if m:
        a, sign, b, d, e = m.groups()
        b = int(b) if sign == "+" else -int(b)
        return QuadraticSurd(int(a), b, int(d), int(e), precision_budget)
    m = _CF_RE.match(text)
    if m:
        a0, rest = m.group(1), m.group(2) or ""
        rest = rest.strip()
        pm = re.match(r"^(.*?)\(\s*([\d\s,]+)\s*\)\s*$", rest)
        if not pm:
            raise ValueError("cf: syntax requires a parenthesized periodic tail")
        head, tail = pm.group(1).strip().rstrip(","), pm.group(2)
        prefix = [int(a0)] + ([int(t) for t in head.split(",")] if head else [])
        period = [int(t) for t in tail.split(",")]
        return quadratic_from_cf(prefix, period, precision_budget)
    raise ValueError(f"unrecognized irrational spec {text!r}")


# ---------------------------------------------------------------------------
# operations

@dataclass(frozen=True)
class Convergent:
    k: int
    p: int
    q: int
    a: int


def cf_expand(spec: IrrationalSpec, count: int) -> list[int]:
    """First `count` partial quotients of the represented real, exactly."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if isinstance(spec, QuadraticSurd):
        it = spec.partial_quotient_iter()
        return [next(it) for _ in range(count)]
    if isinstance(spec, PartialQuotientIrrational):
        return spec.prefix(count)
    return _cf_expand_enclosure(spec, count)


def _enclosure_pq_iter(spec: IrrationalSpec):
    k = 0
    while True:
        yield cf_expand(spec, k + 1)[k]
        k += 1


def _cf_expand_enclosure(spec: IrrationalSpec, count: int) -> list[int]:
    bits = max(_START_BITS, 8 * count)
    while True:
        lo, hi = spec.enclosure(bits)
        out = []
        ok = True
        for k in range(count):
            flo, fhi = math.floor(lo), math.floor(hi)
            if flo != fhi:
                ok = False
                break
            out.append(flo)
            lo, hi = lo - flo, hi - flo
            if lo <= 0:  # cannot certify the next inversion
                ok = False
                break
            lo, hi = 1 / hi, 1 / lo
        if ok:
            return out
        if bits >= spec.precision_budget:
            raise PrecisionExhausted(
                f"cannot certify {count} partial quotients within "
                f"{spec.precision_budget} bits")
        bits = min(bits * 2, spec.precision_budget)


def convergents(spec: IrrationalSpec, count: int) -> list[Convergent]:
    """First `count` convergents p_k/q_k (k = 0..count-1)."""
    quots = cf_expand(spec, count)
    out = []
    p_prev, q_prev = 1, 0
    p, q = quots[0], 1
    out.append(Convergent(0, p, q, quots[0]))
    for k, a in enumerate(quots[1:], start=1):
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append(Convergent(k, p, q, a))
    return out


def floor_linear(spec: IrrationalSpec, n: int, beta=Fraction(0)) -> int:
    """Exact floor(alpha*n + beta) for n >= 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    beta = Fraction(beta)
    if isinstance(spec, QuadraticSurd):
        return spec.floor_linear(n, beta)
    bits = _START_BITS
    while True:
        lo, hi = spec.enclosure(bits)
        vlo, vhi = lo * n + beta, hi * n + beta
        flo, fhi = math.floor(vlo), math.floor(vhi)
        if flo == fhi:
            return flo
        if bits >= spec.precision_budget:
            raise PrecisionExhausted(
                f"floor(alpha*{n}+{beta}) not certified within {spec.precision_budget} bits")
        bits = min(bits * 2, spec.precision_budget)


def frac_compare(spec: IrrationalSpec, n: int, beta, c) -> bool:
    """Exact test {alpha*n + beta} < c for c in (0, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    beta, c = Fraction(beta), Fraction(c)
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0, 1]")
    if c == 1:
        return True  # fractional part of an irrational is in (0,1)
    if isinstance(spec, QuadraticSurd):
        return spec.frac_less(n, beta, c)
    m = floor_linear(spec, n, beta)
    bound = m + c
    bits = _START_BITS
    while True:
        lo, hi = spec.enclosure(bits)
        vlo, vhi = lo * n + beta, hi * n + beta
        if vhi < bound:
            return True
        if vlo > bound:
            return False
        if bits >= spec.precision_budget:
            raise PrecisionExhausted("fractional comparison not certified within budget")
        bits = min(bits * 2, spec.precision_budget)


@dataclass(frozen=True)
class TypeLevel:
    k: int
    a_next: int
    q_k: int
    term: float


@dataclass(frozen=True)
class TypeEstimate:
    tau_hat: float
    levels: tuple[TypeLevel, ...]


def estimate_type(spec: IrrationalSpec, depth: int) -> TypeEstimate:
    """Prefix-based lower estimate of the irrationality type.

    tau_hat = 1 + max over observed levels of log(a_{k+1}) / log(q_k).
    Levels with k < 2 are listed in the diagnostics but excluded from the
    maximum: q_1 can be as small as the first quotient itself, which makes
    the ratio saturate regardless of the true type.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    convs = convergents(spec, depth + 1)
    levels = []
    best = 0.0
    for k in range(1, depth):
        a_next = convs[k + 1].a
        q_k = convs[k].q
        term = 0.0 if a_next == 1 or q_k == 1 else math.log(a_next) / math.log(q_k)
        levels.append(TypeLevel(k, a_next, q_k, term))
        if k >= 2:
            best = max(best, term)
    return TypeEstimate(1.0 + best, tuple(levels))


# ---------------------------------------------------------------------------
# vectorized exact kernels (quadratic surd fast path)

def _isqrt_exact_i64(x: np.ndarray) -> np.ndarray:
    """Exact integer sqrt for int64 arrays with entries < 2^62."""
    s = np.sqrt(x.astype(np.float64)).astype(np.int64)
    s = np.maximum(s, 0)
    for _ in range(4):
        over = s * s > x
        if not over.any():
            break
        s -= over
    for _ in range(4):
        under = (s + 1) * (s + 1) <= x
        if not under.any():
            break
        s += under
    if not bool(((s * s <= x) & ((s + 1) * (s + 1) > x)).all()):
        raise OverflowError("vectorized isqrt failed exactness check")
    return s


def _vector_parts_ok(spec: QuadraticSurd, beta: Fraction, n_max: int,
                     extra: int = 1) -> bool:
    A0, A1, B1, E = spec._linear_parts(beta)
    worst = max(abs(A0) + abs(A1) * n_max, abs(B1) * n_max) * extra
    return (abs(B1) * n_max) ** 2 * spec.d * extra * extra < _I64_SAFE and worst < _I64_SAFE


def floor_linear_array(spec: IrrationalSpec, ns: np.ndarray,
                       beta=Fraction(0)) -> np.ndarray:
    """Exact floor(alpha*n + beta) for an int64 array of n >= 1."""
    beta = Fraction(beta)
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return ns.copy()
    if int(ns.min()) < 1:
        raise ValueError("n must be >= 1")
    if isinstance(spec, QuadraticSurd) and spec.b > 0 \
            and _vector_parts_ok(spec, beta, int(ns.max())):
        A0, A1, B1, E = spec._linear_parts(beta)
        A = A0 + A1 * ns
        B = B1 * ns
        t = _isqrt_exact_i64(B * B * spec.d)
        return (A + t) // E  # numpy floor division matches Python semantics
    return np.array([floor_linear(spec, int(n), beta) for n in ns], dtype=np.int64)


def frac_less_array(spec: IrrationalSpec, ns: np.ndarray, beta, c) -> np.ndarray:
    """Exact {alpha*n + beta} < c, vectorized over n."""
    beta, c = Fraction(beta), Fraction(c)
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(0, dtype=bool)
    if c == 1:
        return np.ones(ns.shape, dtype=bool)
    pc, qc = c.numerator, c.denominator
    if isinstance(spec, QuadraticSurd) and spec.b > 0 \
            and _vector_parts_ok(spec, beta, int(ns.max()), extra=qc):
        A0, A1, B1, E = spec._linear_parts(beta)
        A = A0 + A1 * ns
        B = B1 * ns
        m = (A + _isqrt_exact_i64(B * B * spec.d)) // E
        # {x} < c  <=>  qc*B*sqrt(d) < E*(m*qc + pc) - qc*A, all terms positive-side
        u = E * (m * qc + pc) - qc * A
        v = qc * B
        s = _isqrt_exact_i64(v * v * spec.d)
        return (u > 0) & (s < u)
    return np.array([frac_compare(spec, int(n), beta, c) for n in ns], dtype=bool)


def frac_values_array(spec: IrrationalSpec, ns: np.ndarray, beta=Fraction(0),
                      bits: int = 128) -> np.ndarray:
    """{alpha*n + beta} as float64, reduced mod 1 at `bits` precision.

    The integer part is removed exactly (certified floor); only the residual
    is rounded, so values carry full double accuracy regardless of n.
    """
    beta = Fraction(beta)
    ns = np.asarray(ns, dtype=np.int64)
    floors = floor_linear_array(spec, ns, beta)
    out = np.empty(ns.shape, dtype=np.float64)
    if isinstance(spec, QuadraticSurd):
        A0, A1, B1, E = spec._linear_parts(beta)
        with gmpy2.context(precision=bits):
            sq = gmpy2.sqrt(gmpy2.mpz(spec.d))
            for i, (n, m) in enumerate(zip(ns.tolist(), floors.tolist())):
                res = ((A0 + A1 * n - m * E) + B1 * n * sq) / E
                out[i] = float(res)
    else:
        lo, hi = spec.enclosure(bits)
        mid = (lo + hi) / 2
        for i, (n, m) in enumerate(zip(ns.tolist(), floors.tolist())):
            out[i] = float(mid * n + beta - m)
    np.clip(out, 0.0, np.nextafter(1.0, 0.0), out=out)
    return out
