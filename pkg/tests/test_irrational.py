import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegaps.errors import PrecisionExhausted
from primegaps.irrational import (NamedConstant, PartialQuotientIrrational,
                                  QuadraticSurd, cf_expand, convergents,
                                  estimate_type, floor_linear,
                                  floor_linear_array, frac_compare,
                                  frac_less_array, frac_values_array,
                                  parse_irrational, quadratic_from_cf)

NONSQUARES = [2, 3, 5, 6, 7, 10, 11, 13, 19, 23]

surds = st.builds(
    QuadraticSurd,
    a=st.integers(-50, 50),
    b=st.integers(1, 30),
    d=st.sampled_from(NONSQUARES),
    e=st.integers(1, 40),
)


def _mp_value(s, prec=256):
    with mpmath.workprec(prec):
        return (s.a + s.b * mpmath.sqrt(s.d)) / s.e


# -- construction -----------------------------------------------------------

def test_surd_validation():
    with pytest.raises(ValueError):
        QuadraticSurd(1, 0, 2)  # rational
    with pytest.raises(ValueError):
        QuadraticSurd(1, 1, 9)  # square
    with pytest.raises(ValueError):
        QuadraticSurd(1, 1, 2, 0)  # zero denominator


def test_surd_normalization():
    s = QuadraticSurd(2, -4, 2, -6)
    assert s.e > 0 and math.gcd(math.gcd(abs(s.a), abs(s.b)), s.e) == 1


# -- continued fractions ----------------------------------------------------

def test_cf_golden_ratio(golden):
    assert cf_expand(golden, 5) == [1, 1, 1, 1, 1]


def test_cf_sqrt2(sqrt2):
    assert cf_expand(sqrt2, 4) == [1, 2, 2, 2]


def test_cf_pi(pi_spec):
    # classical expansion, cross-checked against mpmath digits at high precision
    assert cf_expand(pi_spec, 5) == [3, 7, 15, 1, 292]


def test_cf_count_precondition(sqrt2):
    with pytest.raises(ValueError):
        cf_expand(sqrt2, 0)


def test_convergents_sqrt2(sqrt2):
    cs = convergents(sqrt2, 4)
    assert [(c.p, c.q) for c in cs] == [(1, 1), (3, 2), (7, 5), (17, 12)]


def test_convergents_golden_fibonacci(golden):
    cs = convergents(golden, 6)
    assert [(c.p, c.q) for c in cs] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5), (13, 8)]


@given(surds)
@settings(max_examples=60, deadline=None)
def test_convergent_determinant_invariant(s):
    cs = convergents(s, 8)
    for prev, cur in zip(cs, cs[1:]):
        det = cur.p * prev.q - prev.p * cur.q
        assert det in (1, -1)
        assert det == (-1) ** (cur.k - 1)


@given(surds)
@settings(max_examples=40, deadline=None)
def test_convergent_denominators_increase(s):
    cs = convergents(s, 9)
    for prev, cur in zip(cs[1:], cs[2:]):
        assert cur.q > prev.q


@given(surds)
@settings(max_examples=40, deadline=None)
def test_convergent_error_bounds(s):
    cs = convergents(s, 8)
    with mpmath.workprec(256):
        val = _mp_value(s)
        for cur, nxt in zip(cs, cs[1:]):
            err = abs(val - mpmath.mpf(cur.p) / cur.q)
            assert err < mpmath.mpf(1) / (cur.q * nxt.q)
            assert err < mpmath.mpf(1) / cur.q ** 2


def test_cf_via_enclosure_matches_exact(sqrt2):
    # the generic interval Gauss map must agree with the exact integer path
    stream = PartialQuotientIrrational(iter(cf_expand(sqrt2, 40)))
    assert stream.prefix(20) == cf_expand(sqrt2, 20)


# -- floors and fractional parts -------------------------------------------

def test_floor_linear_examples(sqrt2):
    assert floor_linear(sqrt2, 5) == 7
    assert floor_linear(sqrt2, 1) == 1
    with pytest.raises(ValueError):
        floor_linear(sqrt2, 0)


@given(surds, st.integers(1, 10 ** 6), st.fractions(min_value=-5, max_value=5,
                                                    max_denominator=50))
@settings(max_examples=120, deadline=None)
def test_floor_cross_oracle_256bit(s, n, beta):
    # float evaluation at 256 bits, rounded down, must equal the exact floor
    with mpmath.workprec(256):
        approx = _mp_value(s) * n + mpmath.mpf(beta.numerator) / beta.denominator
        assert floor_linear(s, n, beta) == int(mpmath.floor(approx))


def test_frac_compare_examples(sqrt2):
    assert frac_compare(sqrt2, 1, 0, Fraction(1, 2))
    assert not frac_compare(sqrt2, 2, 0, Fraction(1, 2))
    assert frac_compare(sqrt2, 17, 0, 1)  # c = 1 always true


@given(surds, st.integers(1, 10 ** 4),
       st.fractions(min_value=Fraction(1, 64), max_value=1, max_denominator=64),
       st.fractions(min_value=Fraction(1, 64), max_value=1, max_denominator=64))
@settings(max_examples=80, deadline=None)
def test_frac_compare_monotone_in_c(s, n, c1, c2):
    if c1 > c2:
        c1, c2 = c2, c1
    if frac_compare(s, n, 0, c1):
        assert frac_compare(s, n, 0, c2)


def test_floor_linear_pi(pi_spec):
    for n in (1, 7, 113, 33102):
        assert floor_linear(pi_spec, n) == int(mpmath.floor(mpmath.mpf(mpmath.pi) * n))


def test_precision_exhausted_small_budget():
    pi_tiny = NamedConstant("pi", precision_budget=16)
    with pytest.raises(PrecisionExhausted):
        floor_linear(pi_tiny, 10 ** 30)


# -- type estimation ---------------------------------------------------------

def test_type_golden_exact_one(golden):
    est = estimate_type(golden, 30)
    assert est.tau_hat == 1.0
    assert all(l.term == 0.0 for l in est.levels)


def test_type_sqrt2_window(sqrt2):
    est = estimate_type(sqrt2, 30)
    assert 1.0 <= est.tau_hat <= 1.8
    # correction terms decay with k (bounded quotients, growing denominators)
    terms = [l.term for l in est.levels if l.k >= 2]
    assert terms[-1] < terms[0]
    assert terms[-1] < 0.1


def test_type_synthetic_two():
    def quotients():
        yield 1
        yield 2
        p_prev, p, q_prev, q = 1, 3, 1, 2  # convergents of [1;2,...]
        while True:
            a = q
            yield a
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q

    spec = PartialQuotientIrrational(quotients())
    est = estimate_type(spec, 10)
    assert abs(est.tau_hat - 2.0) < 1e-12


def test_type_depth_precondition(sqrt2):
    with pytest.raises(ValueError):
        estimate_type(sqrt2, 1)


# -- parsing -----------------------------------------------------------------

def test_parse_surd_roundtrip():
    s = parse_irrational("surd:(1+1*sqrt(5))/2")
    assert isinstance(s, QuadraticSurd)
    assert cf_expand(s, 4) == [1, 1, 1, 1]


def test_parse_named():
    assert parse_irrational("pi").name == "pi"


def test_parse_cf_periodic():
    s = parse_irrational("cf:[1;(2)]")
    assert isinstance(s, QuadraticSurd)
    assert cf_expand(s, 5) == [1, 2, 2, 2, 2]
    s2 = parse_irrational("cf:[2;1,(2,1)]")
    assert cf_expand(s2, 6) == [2, 1, 2, 1, 2, 1]


def test_parse_rejects():
    with pytest.raises(ValueError):
        parse_irrational("cf:[1;2,3]")  # no periodic tail: rational
    with pytest.raises(ValueError):
        parse_irrational("sqrt(2)")


def test_periodic_cf_degenerate_rejected():
    with pytest.raises(ValueError):
        quadratic_from_cf([1], [])


# -- vector kernels ----------------------------------------------------------

@given(surds, st.fractions(min_value=-3, max_value=3, max_denominator=30),
       st.fractions(min_value=Fraction(1, 50), max_value=1, max_denominator=50))
@settings(max_examples=40, deadline=None)
def test_vector_kernels_match_scalar(s, beta, c):
    ns = np.arange(1, 40, dtype=np.int64)
    floors = floor_linear_array(s, ns, beta)
    assert floors.tolist() == [floor_linear(s, int(n), beta) for n in ns]
    fl = frac_less_array(s, ns, beta, c)
    assert fl.tolist() == [frac_compare(s, int(n), beta, c) for n in ns]


def test_frac_values_high_precision(sqrt2):
    ns = np.arange(1, 2000, dtype=np.int64)
    vals = frac_values_array(sqrt2, ns)
    with mpmath.workprec(200):
        r2 = mpmath.sqrt(2)
        for n in (1, 997, 1999):
            expect = float(mpmath.frac(r2 * n))
            assert abs(vals[n - 1] - expect) < 1e-15
    assert ((vals >= 0) & (vals < 1)).all()
