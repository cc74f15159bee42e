import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from primegaps.errors import ValidationFailed
from primegaps.irrational import QuadraticSurd
from primegaps.sequences import (BeattySpec, LeitmannFunction, beatty_count_ap,
                                 beatty_membership, beatty_term, beatty_window,
                                 leitmann_li, leitmann_term, leitmann_validate,
                                 leitmann_window, parse_leitmann)


# -- Beatty -------------------------------------------------------------------

def test_beatty_term_examples(sqrt2, spec_half):
    assert beatty_term(spec_half, 3) == 4
    assert beatty_term(spec_half, 7) == 9
    golden = BeattySpec(QuadraticSurd(1, 1, 5, 2))
    assert beatty_term(golden, 1) == 1  # floor(alpha)


def test_beatty_window_examples(spec_half):
    w = beatty_window(spec_half, 1, 12)
    assert w.terms.tolist() == [1, 4, 7, 8, 11]
    assert w.witnesses.tolist() == [1, 3, 5, 6, 8]
    full = beatty_window(spec_half.full(), 1, 12)
    assert full.terms.tolist() == [1, 2, 4, 5, 7, 8, 9, 11]


def test_beatty_window_density(spec_half):
    N = 10 ** 5
    count = len(beatty_window(spec_half, 1, N))
    assert abs(count * 2 * math.sqrt(2) / N - 1) <= 0.01


def test_window_workers_deterministic(spec_half):
    a = beatty_window(spec_half, 1, 300_000, workers=1)
    b = beatty_window(spec_half, 1, 300_000, workers=3)
    assert (a.terms == b.terms).all() and (a.witnesses == b.witnesses).all()


def test_window_additive(spec_half):
    w1 = beatty_window(spec_half, 1, 5000)
    w2 = beatty_window(spec_half, 5000, 10000)
    w = beatty_window(spec_half, 1, 10000)
    assert len(w1) + len(w2) == len(w)
    assert np.concatenate([w1.terms, w2.terms]).tolist() == w.terms.tolist()


def test_three_distance_gaps(sqrt2):
    # classical: for c=1 and alpha > 1, consecutive Beatty terms differ by
    # floor(alpha) or ceil(alpha)
    w = beatty_window(BeattySpec(sqrt2), 1, 10 ** 4)
    gaps = set(np.diff(w.terms).tolist())
    assert gaps == {1, 2}


def test_membership_examples(spec_half):
    ok, n = beatty_membership(spec_half, 7)
    assert ok and n == 5
    ok, n = beatty_membership(spec_half, 2)
    assert not ok and n is None


def test_membership_witness_reverified(spec_half):
    for m in (1, 4, 7, 8, 11, 2378):
        ok, n = beatty_membership(spec_half, m)
        if ok:
            assert beatty_term(spec_half, n) == m


@pytest.mark.parametrize("alpha,beta,c", [
    ("sqrt2", 0, Fraction(1, 2)),
    ("golden", 0, Fraction(1, 3)),
    ("sqrt2", Fraction(1, 3), Fraction(2, 5)),
    ("pi", 0, Fraction(1, 2)),
])
def test_membership_exhaustive_vs_enumeration(alpha, beta, c, sqrt2, golden,
                                              pi_spec):
    spec = BeattySpec({"sqrt2": sqrt2, "golden": golden, "pi": pi_spec}[alpha],
                      beta, c)
    limit = 10 ** 5
    members = set(beatty_window(spec, 1, limit).terms.tolist())
    for m in range(1, limit):
        assert beatty_membership(spec, m)[0] == (m in members), m


def test_count_ap_examples(spec_half):
    assert beatty_count_ap(spec_half, 11, 2, 1) == 3  # members 1, 7, 11
    assert beatty_count_ap(spec_half, 11, 1, 0) == 5
    total = beatty_count_ap(spec_half, 1000, 1, 0)
    assert sum(beatty_count_ap(spec_half, 1000, 7, a) for a in range(7)) == total


def test_count_ap_window_variant(spec_half):
    x = 1000
    w = beatty_window(spec_half, x, 2 * x)
    assert beatty_count_ap(spec_half, x, 3, 1, window=True) == \
        int((w.terms % 3 == 1).sum())


# -- Leitmann -----------------------------------------------------------------

def test_leitmann_term_example():
    f = LeitmannFunction.power(Fraction(21, 20))
    assert leitmann_term(f, 5) == 5  # floor(5^1.05) = floor(5.4190...)


def test_leitmann_window_example():
    f = LeitmannFunction.power(Fraction(21, 20))
    w = leitmann_window(f, 2, 6)
    assert w.terms.tolist() == [2, 3, 4, 5]
    assert w.witnesses.tolist() == [2, 3, 4, 5]


def test_leitmann_floor_matches_mpmath():
    f = LeitmannFunction.power(Fraction(21, 20))
    with mpmath.workprec(128):
        for n in (2, 17, 1000, 123457):
            assert f.floor_at(n) == int(mpmath.floor(mpmath.mpf(n) ** (mpmath.mpf(21) / 20)))


def test_leitmann_gamma_window_rejected():
    with pytest.raises(ValueError):
        LeitmannFunction.power(Fraction(1))
    with pytest.raises(ValueError):
        LeitmannFunction.power(Fraction(12, 11))


def test_leitmann_window_witness_bracket():
    f = LeitmannFunction.power(Fraction(21, 20))
    w = leitmann_window(f, 100, 1000)
    for t, n in zip(w.terms.tolist(), w.witnesses.tolist()):
        assert f.inverse(t) <= n + 1e-9
        assert n < f.inverse(t + 1) + 1e-9


def test_leitmann_validate_power():
    f = LeitmannFunction.power(Fraction(21, 20))
    rep = leitmann_validate(f)
    assert rep.declared == (1.05, f.alpha2, f.alpha3)
    assert max(rep.final_errors) < 1e-6


def test_leitmann_validate_logpow():
    g = LeitmannFunction.logpow(1)
    rep = leitmann_validate(g)
    assert rep.declared == (1.0, 0.0, -1.0)
    # alpha2 = 0 branch: s(x) = x f''/f' positive and shrinking
    assert rep.s_factor is not None
    assert all(s > 0 for s in rep.s_factor)
    assert rep.s_factor[-1] < rep.s_factor[0]


def test_leitmann_validate_bad_declaration():
    f = LeitmannFunction.power(Fraction(21, 20))
    with pytest.raises(ValidationFailed):
        LeitmannFunction.custom(f.f, f.df, f.d2f, f.d3f, f.inverse, 2,
                                (1.05, 1.05, -0.95))


def test_leitmann_validate_wrong_alphas_fail():
    f = LeitmannFunction.power(Fraction(21, 20))
    bad = LeitmannFunction.custom(f.f, f.df, f.d2f, f.d3f, f.inverse, 2,
                                  (1.80, 0.05, -0.95))
    with pytest.raises(ValidationFailed):
        leitmann_validate(bad)


def test_leitmann_li_edge_and_monotone():
    f = LeitmannFunction.power(Fraction(21, 20))
    c = f.f(f.c0)
    assert leitmann_li(f, c, c) == 0.0
    v1, v2 = leitmann_li(f, c, 10 ** 4), leitmann_li(f, c, 10 ** 5)
    assert 0 < v1 < v2


def test_leitmann_li_vs_substitution_oracle():
    # independent quadrature: substituting t = f(u) gives
    # integral over u in [c0, g(x)] of du / log f(u)
    f = LeitmannFunction.power(Fraction(21, 20))
    c = f.f(f.c0)
    for x in (10 ** 3, 10 ** 5):
        direct = leitmann_li(f, c, x)
        oracle, err = quad(lambda u: 1.0 / math.log(f.f(u)), f.c0, f.inverse(x),
                           epsrel=1e-11, limit=300)
        assert direct == pytest.approx(oracle, rel=1e-7)


def test_parse_leitmann():
    assert parse_leitmann("power:1.05").kind == "power"
    assert parse_leitmann("logpow:2").kind == "logpow"
    assert parse_leitmann("explog:1,0.5").kind == "explog"
    assert parse_leitmann("iterlog:1").kind == "iterlog"
    with pytest.raises(ValueError):
        parse_leitmann("cubic:3")
