import math
import os

import numpy as np
import pytest
import sympy

from primegaps.errors import CacheIOError, CapExceeded, RangeError
from primegaps.sieve import (MAGIC, PrimeTable, build_table, bv_error_table,
                             chebyshev_sum, euler_phi, pi_count, von_mangoldt)


def test_build_small_counts():
    t = build_table(100)
    assert t.pi(100) == 25


def test_build_invalid_limit():
    with pytest.raises(CapExceeded):
        build_table(1)
    with pytest.raises(CapExceeded):
        build_table(10 ** 6, cap=10 ** 5)


def test_pi_1e8():
    # classical value, cross-checked against the independent count below at 1e5
    t = build_table(10 ** 8)
    assert t.pi(10 ** 8) == 5761455


def test_exhaustive_agreement_to_1e6(table):
    flags = np.zeros(10 ** 6 + 1, dtype=bool)
    flags[list(sympy.primerange(2, 10 ** 6 + 1))] = True
    ours = np.zeros(10 ** 6 + 1, dtype=bool)
    ours[table.primes_upto(10 ** 6)] = True
    assert (flags == ours).all()


def test_segmented_matches_monolithic():
    a = build_table(300_000, segment_odds=1 << 18)
    b = build_table(300_000, segment_odds=1 << 11)
    assert (a._bits == b._bits).all()


def test_query_beyond_limit_errors():
    t = build_table(1000)
    with pytest.raises(RangeError):
        t.is_prime(1001)
    with pytest.raises(RangeError):
        t.primes_upto(2000)
    with pytest.raises(RangeError):
        t.is_prime_array(np.array([5, 1002]))


def test_is_prime_array(table):
    ns = np.array([1, 2, 3, 4, 9, 97, 561, 7919])
    expect = [sympy.isprime(int(n)) for n in ns]
    assert table.is_prime_array(ns).tolist() == expect


def test_pi_count_examples(table):
    assert pi_count(table, 100, 4, 1) == 11
    assert pi_count(table, 100, 1, 0) == 25
    assert pi_count(table, 2, 2, 1) == 0


def test_pi_count_partition(table):
    for x, q in ((100, 4), (10 ** 5, 7), (12345, 12)):
        assert sum(pi_count(table, x, q, a) for a in range(q)) == pi_count(table, x, 1, 0)


def test_von_mangoldt_values():
    assert von_mangoldt(1) == 0.0
    assert von_mangoldt(8) == pytest.approx(math.log(2), rel=1e-15)
    assert von_mangoldt(12) == 0.0
    assert von_mangoldt(9) == pytest.approx(math.log(3), rel=1e-15)


def test_von_mangoldt_support_matches_prime_powers():
    for n in range(1, 2000):
        fac = sympy.factorint(n)
        is_pp = len(fac) == 1 and n > 1
        assert (von_mangoldt(n) > 0) == is_pp


def test_chebyshev_examples(table):
    expect = 3 * math.log(2) + 2 * math.log(3) + math.log(5) + math.log(7)
    assert chebyshev_sum(table, 10) == pytest.approx(expect, abs=1e-12)
    assert chebyshev_sum(table, 1) == 0.0
    assert 0.98 <= chebyshev_sum(table, 10 ** 6) / 10 ** 6 <= 1.02


def test_chebyshev_partition(table):
    for M, q in ((10 ** 4, 3), (54321, 5)):
        total = chebyshev_sum(table, M)
        parts = sum(chebyshev_sum(table, M, q, a) for a in range(q))
        assert parts == pytest.approx(total, rel=1e-12)


def test_bv_error_table(table):
    reports, total, _ = bv_error_table(table, 10 ** 5, 1)
    assert total == 0.0
    reports, total, _ = bv_error_table(table, 10 ** 5, 3)
    row3 = reports[2]
    assert row3.q == 3
    diff = abs(row3.counts[1] - row3.counts[2])
    assert diff <= 2 * row3.max_error
    assert sum(row3.counts) == row3.pi_x


def test_bv_smallness_at_1e6(table):
    q_max = int((10 ** 6) ** 0.4)
    _, total, _ = bv_error_table(table, 10 ** 6, q_max)
    assert total / 10 ** 6 <= 0.01


def test_euler_phi():
    assert euler_phi(1) == 1
    assert euler_phi(12) == 4
    assert euler_phi(97) == 96
    for q in range(1, 500):
        assert euler_phi(q) == sympy.totient(q)


def test_cache_roundtrip(tmp_path):
    t = build_table(10 ** 4)
    path = str(tmp_path / "cache.bin")
    t.save(path)
    loaded = PrimeTable.load(path)
    assert loaded.limit == t.limit
    assert (loaded._bits == t._bits).all()


def test_cache_exact_bytes(tmp_path):
    # limit=20: odd entries 3..19, composites 9 (bit 3) and 15 (bit 6)
    t = build_table(20)
    path = str(tmp_path / "c.bin")
    t.save(path)
    raw = open(path, "rb").read()
    assert raw == MAGIC + (20).to_bytes(8, "little") + bytes([0x48, 0x00])


def test_cache_bad_magic(tmp_path):
    path = str(tmp_path / "bad.bin")
    with open(path, "wb") as fh:
        fh.write(b"NOPE" + bytes(16))
    with pytest.raises(CacheIOError):
        PrimeTable.load(path)


def test_cache_dir_reuse(tmp_path):
    d = str(tmp_path)
    t1 = build_table(5000, cache_dir=d)
    assert os.path.exists(os.path.join(d, "pgl_5000.bin"))
    t2 = build_table(5000, cache_dir=d)
    assert (t1._bits == t2._bits).all()
