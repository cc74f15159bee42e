"""Segmented prime sieve with progression counting and Chebyshev sums.

The table stores a packed odd-composite bitset (bit i = 1 iff 2i+3 is
composite, little bit order), which is also the on-disk cache format:
magic ``PGL1``, little-endian u64 limit, then the bitset with no padding.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from ._util import fsum
from .errors import CacheIOError, CapExceeded, RangeError

MAGIC = b"PGL1"
DEFAULT_SEGMENT_ODDS = 1 << 18
DEFAULT_LIMIT_CAP = 400_000_000
CACHE_ENV = "PRIMEGAP_CACHE_DIR"


def _odd_entries(limit: int) -> int:
    return max(0, (limit - 1) // 2)  # odd numbers 3, 5, ..., covering n <= limit


class PrimeTable:
    """Immutable primality/von Mangoldt oracle for 2 <= n <= limit."""

    def __init__(self, limit: int, packed_bits: np.ndarray):
        self.limit = int(limit)
        self._bits = packed_bits  # uint8, little bit order over odd indices
        self._primes: np.ndarray | None = None
        self._prime_powers: tuple[np.ndarray, np.ndarray] | None = None

    # -- queries ------------------------------------------------------------

    def _check_range(self, n: int):
        if n > self.limit:
            raise RangeError(f"query {n} beyond table limit {self.limit}")

    def is_prime(self, n: int) -> bool:
        self._check_range(n)
        if n < 2:
            return False
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        i = (n - 3) >> 1
        return not (self._bits[i >> 3] >> (i & 7)) & 1

    def is_prime_array(self, ns: np.ndarray) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and int(ns.max()) > self.limit:
            raise RangeError("array query beyond table limit")
        out = np.zeros(ns.shape, dtype=bool)
        odd = (ns % 2 == 1) & (ns >= 3)
        idx = (ns[odd] - 3) >> 1
        composite = (self._bits[(idx >> 3)] >> (idx & 7).astype(np.uint8)) & 1
        out[odd] = composite == 0
        out |= ns == 2
        return out

    def primes(self) -> np.ndarray:
        """All primes <= limit as a sorted int64 array (cached)."""
        if self._primes is None:
            flags = np.unpackbits(self._bits, bitorder="little")[: _odd_entries(self.limit)]
            odd_primes = 2 * np.flatnonzero(flags == 0).astype(np.int64) + 3
            self._primes = np.concatenate(([2], odd_primes)) if self.limit >= 2 \
                else odd_primes
        return self._primes

    def primes_upto(self, x: int) -> np.ndarray:
        self._check_range(x)
        ps = self.primes()
        return ps[: np.searchsorted(ps, x, side="right")]

    def pi(self, x: int) -> int:
        return int(self.primes_upto(x).size)

    def prime_powers(self) -> tuple[np.ndarray, np.ndarray]:
        """Sorted prime powers p^j <= limit with their Lambda values log p."""
        if self._prime_powers is None:
            ps = self.primes()
            vals = [ps]
            logs = [np.log(ps.astype(np.float64))]
            for p in ps[ps <= math.isqrt(self.limit)].tolist():
                pk = p * p
                lp = math.log(p)
                while pk <= self.limit:
                    vals.append(np.array([pk], dtype=np.int64))
                    logs.append(np.array([lp]))
                    pk *= p
            values = np.concatenate(vals)
            weights = np.concatenate(logs)
            order = np.argsort(values, kind="stable")
            self._prime_powers = (values[order], weights[order])
        return self._prime_powers

    # -- cache ----------------------------------------------------------------

    def save(self, path: str):
        try:
            with open(path, "wb") as fh:
                fh.write(MAGIC)
                fh.write(self.limit.to_bytes(8, "little"))
                fh.write(self._bits.tobytes())
        except OSError as exc:
            raise CacheIOError(f"cannot write prime cache {path}: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "PrimeTable":
        try:
            with open(path, "rb") as fh:
                magic = fh.read(4)
                if magic != MAGIC:
                    raise CacheIOError(f"bad magic in {path}: {magic!r}")
                limit = int.from_bytes(fh.read(8), "little")
                raw = fh.read()
        except OSError as exc:
            raise CacheIOError(f"cannot read prime cache {path}: {exc}") from exc
        expect = (_odd_entries(limit) + 7) // 8
        if len(raw) != expect:
            raise CacheIOError(f"truncated prime cache {path}")
        return cls(limit, np.frombuffer(raw, dtype=np.uint8).copy())


def _base_sieve(limit: int) -> np.ndarray:
    """Dense boolean sieve for the base primes (is_composite flags)."""
    comp = np.zeros(limit + 1, dtype=bool)
    comp[:2] = True
    for p in range(2, math.isqrt(limit) + 1):
        if not comp[p]:
            comp[p * p :: p] = True
    return comp


def build_table(limit: int, segment_odds: int = DEFAULT_SEGMENT_ODDS,
                cap: int = DEFAULT_LIMIT_CAP, cache_dir: str | None = None) -> PrimeTable:
    """Sieve all n <= limit, returning a PrimeTable.

    Memory is O(limit/16) bytes for the packed bitset.  `segment_odds`
    controls how many odd entries are marked per pass (cache tuning knob).
    With `cache_dir` (or $PRIMEGAP_CACHE_DIR) set, tables are persisted and
    reloaded keyed by limit.
    """
    if limit < 2:
        raise CapExceeded(f"limit must be >= 2, got {limit}")
    if limit > cap:
        raise CapExceeded(f"limit {limit} exceeds cap {cap}")
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    cache_path = None
    if cache_dir:
        cache_path = os.path.join(cache_dir, f"pgl_{limit}.bin")
        if os.path.exists(cache_path):
            return PrimeTable.load(cache_path)

    n_entries = _odd_entries(limit)
    base_comp = _base_sieve(math.isqrt(limit))
    base_odd_primes = np.flatnonzero(~base_comp)
    base_odd_primes = base_odd_primes[base_odd_primes % 2 == 1]

    packed = np.zeros((n_entries + 7) // 8, dtype=np.uint8)
    for seg_start in range(0, n_entries, segment_odds):
        seg_stop = min(seg_start + segment_odds, n_entries)
        seg = np.zeros(seg_stop - seg_start, dtype=bool)
        lo_val = 2 * seg_start + 3
        hi_val = 2 * (seg_stop - 1) + 3
        for p in base_odd_primes.tolist():
            if p * p > hi_val:
                break
            start = max(p * p, ((lo_val + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start > hi_val:
                continue
            seg[(start - lo_val) // 2 :: p] = True
        packed_seg = np.packbits(seg, bitorder="little")
        # segment boundaries are byte-aligned only when segment_odds % 8 == 0
        if seg_start % 8 == 0:
            packed[seg_start // 8 : seg_start // 8 + packed_seg.size] |= packed_seg
        else:  # pragma: no cover - segment sizes are kept byte aligned
            raise ValueError("segment_odds must be a multiple of 8")
        del seg
    table = PrimeTable(limit, packed)
    if cache_path:
        os.makedirs(cache_dir, exist_ok=True)
        table.save(cache_path)
    return table


def von_mangoldt(n: int, table: PrimeTable | None = None) -> float:
    """Lambda(n): log p if n = p^j, else 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0.0
    if table is not None and n <= table.limit and table.is_prime(n):
        return math.log(n)
    # find the smallest prime factor by trial division
    m, p = n, None
    for cand in range(2, math.isqrt(n) + 1):
        if m % cand == 0:
            p = cand
            break
    if p is None:
        return math.log(n)  # n itself prime
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def pi_count(table: PrimeTable, x: int, q: int, a: int) -> int:
    """#{p <= x prime : p = a (mod q)}."""
    if not 0 <= a < q:
        raise ValueError("need 0 <= a < q")
    table._check_range(x)
    ps = table.primes_upto(x)
    if q == 1:
        return int(ps.size)
    return int(np.count_nonzero(ps % q == a))


def chebyshev_sum(table: PrimeTable, M: int, q: int = 1, a: int = 0) -> float:
    """Sum of Lambda(m) over m <= M with m = a (mod q), exactly accumulated."""
    if not 0 <= a < q:
        raise ValueError("need 0 <= a < q")
    table._check_range(M)
    if M < 1:
        return 0.0
    vals, logs = table.prime_powers()
    cut = np.searchsorted(vals, M, side="right")
    vals, logs = vals[:cut], logs[:cut]
    if q > 1:
        mask = vals % q == a
        logs = logs[mask]
    return fsum(logs)


@dataclass(frozen=True)
class APCountReport:
    """Prime counts per residue class modulo q, with the worst-class error."""

    x: int
    q: int
    counts: tuple[int, ...]  # pi(x; q, a) for a = 0..q-1
    pi_x: int
    phi_q: int
    max_error: float  # max over (a,q)=1 of |pi(x;q,a) - pi(x)/phi(q)|


def euler_phi(q: int, table: PrimeTable | None = None) -> int:
    """Euler totient by trial factorization (against table primes when given)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if table is not None and math.isqrt(q) > table.limit:
        raise RangeError(f"{q} exceeds factorable range of table")
    result, m = q, q
    p = 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


def bv_error_table(table: PrimeTable, x: int, q_max: int, A: float = 2.0):
    """Per-modulus AP reports plus the Bombieri-Vinogradov style error sum.

    Returns (reports, total, normalized) where total is
    sum over q <= q_max of max over (a,q)=1 of |pi(x;q,a) - pi(x)/phi(q)|
    and normalized = total * (log x)^A / x.
    """
    table._check_range(x)
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    ps = table.primes_upto(x)
    pi_x = int(ps.size)
    reports = []
    total = 0.0
    for q in range(1, q_max + 1):
        counts = np.bincount(ps % q, minlength=q)
        phi_q = euler_phi(q)
        expect = pi_x / phi_q
        err = 0.0
        for a in range(q):
            if math.gcd(a, q) == 1:
                err = max(err, abs(int(counts[a]) - expect))
        if q == 1:
            err = 0.0  # single class: pi(x;1,0) = pi(x) identically
        reports.append(APCountReport(x, q, tuple(int(c) for c in counts),
                                     pi_x, phi_q, err))
        total += err
    normalized = total * math.log(x) ** A / x
    return reports, total, normalized
