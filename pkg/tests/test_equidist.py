import math
from fractions import Fraction

import numpy as np
import pytest

from primegaps.errors import InvalidCurvature, QTooLarge
from primegaps.equidist import (PhaseFunction, UnitSequence,
                                curvature_floor, discrepancy_extreme,
                                discrepancy_star, erdos_turan_best,
                                erdos_turan_bound, exp_sum, leitmann_discrepancy,
                                leitmann_phase, scaled_beatty_discrepancy,
                                vdc_bound, vdc_check)
from primegaps.sequences import LeitmannFunction


from oracles import extreme_oracle, star_oracle


def _random_instances(rng, count, max_n=200):
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        kind = rng.integers(0, 4)
        if kind == 0:
            vals = rng.random(n)
        elif kind == 1:  # clustered with ties
            base = rng.random(max(1, n // 4))
            vals = rng.choice(base, size=n)
        elif kind == 2:  # near-equally spaced with jitter
            vals = (np.arange(n) / n + rng.normal(0, 0.01, n)) % 1.0
        else:  # few distinct values
            vals = rng.choice([0.0, 0.25, 0.5, 0.9], size=n)
        out.append(vals)
    return out


def structured_instances(sqrt2):
    seqs = [UnitSequence.beatty_multiples(sqrt2, n).values for n in (10, 113, 500)]
    seqs += [np.arange(n) / n for n in (1, 10, 64)]
    seqs += [np.zeros(5), np.full(7, 0.5), np.array([0.1, 0.1, 0.1, 0.7])]
    return seqs


# -- discrepancy ---------------------------------------------------------------

def test_star_examples():
    assert discrepancy_star(UnitSequence(np.array([0.5]))) == 0.5
    assert discrepancy_star(UnitSequence(np.arange(10) / 10)) == pytest.approx(0.1)
    assert discrepancy_star(UnitSequence(np.zeros(4))) == 1.0


def test_extreme_examples():
    assert discrepancy_extreme(UnitSequence(np.array([0.5]))) == 1.0
    assert discrepancy_extreme(UnitSequence(np.arange(10) / 10)) == pytest.approx(0.1)


def test_discrepancy_matches_oracle(rng, sqrt2):
    for vals in _random_instances(rng, 60) + structured_instances(sqrt2):
        seq = UnitSequence(vals)
        assert discrepancy_star(seq) == pytest.approx(star_oracle(vals), abs=1e-12)
        assert discrepancy_extreme(seq) == pytest.approx(extreme_oracle(vals), abs=1e-12)


def test_star_le_extreme_le_twice_star(rng):
    for vals in _random_instances(rng, 100):
        seq = UnitSequence(vals)
        ds, de = discrepancy_star(seq), discrepancy_extreme(seq)
        assert ds <= de + 1e-15
        assert de <= 2 * ds + 1e-15
        assert 1 / seq.n - 1e-15 <= de <= 1.0 + 1e-15


def test_shift_robustness(rng):
    # wraparound-free intervals: a translate splits one interval into at
    # most two, so the shifted discrepancy is at most doubled
    for vals in _random_instances(rng, 30, max_n=80):
        seq = UnitSequence(vals)
        d = discrepancy_extreme(seq)
        for _ in range(3):
            t = rng.random()
            shifted = UnitSequence((vals + t) % 1.0)
            assert discrepancy_extreme(shifted) <= 2 * d + 1e-12


# -- exponential sums ----------------------------------------------------------

def test_exp_sum_examples(sqrt2):
    zeros = UnitSequence(np.zeros(17))
    assert exp_sum(zeros, 5) == pytest.approx(17 + 0j)
    roots = UnitSequence(np.arange(64) / 64)
    assert abs(exp_sum(roots, 1)) < 1e-10
    seq = UnitSequence.beatty_multiples(sqrt2, 10 ** 4)
    assert abs(exp_sum(seq, 1)) <= 10.0


def test_exp_sum_bounded_by_n(rng):
    for vals in _random_instances(rng, 20):
        seq = UnitSequence(vals)
        for h in (1, 3, 11):
            assert abs(exp_sum(seq, h)) <= seq.n + 1e-9


# -- Erdos-Turan ----------------------------------------------------------------

def test_et_bound_examples(sqrt2):
    eq = UnitSequence(np.arange(10) / 10)
    assert discrepancy_extreme(eq) <= erdos_turan_bound(eq, 1)
    seq = UnitSequence.beatty_multiples(sqrt2, 10 ** 4)
    d = discrepancy_extreme(seq)
    for m in (10, 100, 1000):
        assert d <= erdos_turan_bound(seq, m)


def test_et_bound_all_zero_points():
    zeros = UnitSequence(np.zeros(9))
    for m in (1, 10, 100, 1000):
        assert erdos_turan_bound(zeros, m) >= 1.0  # = D_N


def test_et_bound_random(rng):
    for vals in _random_instances(rng, 40):
        seq = UnitSequence(vals)
        d = discrepancy_extreme(seq)
        for m in (1, 7, 50):
            assert d <= erdos_turan_bound(seq, m) + 1e-12


def test_et_best(sqrt2):
    seq = UnitSequence.beatty_multiples(sqrt2, 2000)
    m, bound = erdos_turan_best(seq, (10, 100, 1000))
    assert bound == min(erdos_turan_bound(seq, k) for k in (10, 100, 1000))
    assert discrepancy_extreme(seq) <= bound


def test_et_configurable_constant(sqrt2):
    seq = UnitSequence.beatty_multiples(sqrt2, 500)
    default = erdos_turan_bound(seq, 50)
    custom = erdos_turan_bound(seq, 50, C=10.0)
    assert default != custom


# -- van der Corput bound --------------------------------------------------------

def test_vdc_quadratic_example():
    ph = PhaseFunction(lambda n: 0.3 * n * n, lambda n: 0.6 * n, lambda n: 0.6)
    mag, bound, ok = vdc_check(ph, 0, 100, 0.6)
    assert ok
    assert bound == pytest.approx((60.0 + 2) * (4 / math.sqrt(0.6) + 3))


def test_vdc_linear_rejected():
    lin = PhaseFunction(lambda n: 0.5 * n, lambda n: 0.5, lambda n: 0.0)
    with pytest.raises(InvalidCurvature):
        vdc_bound(lin, 0, 10, 0.1)


def test_vdc_rho_not_lower_bound():
    ph = PhaseFunction(lambda n: 0.3 * n * n, lambda n: 0.6 * n, lambda n: 0.6)
    with pytest.raises(InvalidCurvature):
        vdc_bound(ph, 0, 100, 0.7)


def test_vdc_leitmann_phase():
    f = LeitmannFunction.power(Fraction(21, 20))
    ph = leitmann_phase(f, 1, 1)
    rho = curvature_floor(ph, 1000, 10000)
    mag, bound, ok = vdc_check(ph, 1000, 10000, rho)
    assert ok and mag <= bound


def test_curvature_floor_monotone():
    f = LeitmannFunction.power(Fraction(21, 20))
    ph = leitmann_phase(f, 2, 3)
    rho = curvature_floor(ph, 100, 1000)
    assert rho == pytest.approx(ph.d2f(1000))  # f'' decreasing


# -- discrepancy reports ----------------------------------------------------------

def test_scaled_beatty_report(sqrt2):
    rep = scaled_beatty_discrepancy(sqrt2, 1, 10 ** 4)
    assert rep.d_extreme <= 0.01
    assert rep.d_star <= rep.d_extreme
    assert rep.d_extreme <= rep.et_bound
    assert not rep.q_too_large


def test_scaled_beatty_q_too_large_flag(sqrt2):
    rep = scaled_beatty_discrepancy(sqrt2, 999, 1000)
    assert rep.q_too_large


def test_scaled_beatty_preconditions(sqrt2):
    with pytest.raises(ValueError):
        scaled_beatty_discrepancy(sqrt2, 0, 100)
    with pytest.raises(ValueError):
        scaled_beatty_discrepancy(sqrt2, 100, 100)


def test_leitmann_discrepancy_report():
    f = LeitmannFunction.power(Fraction(21, 20))
    N = 10 ** 4
    rep = leitmann_discrepancy(f, 1, N)
    assert rep.d_extreme <= 5 * N ** (-1 / 11)
    assert rep.envelope == pytest.approx(N ** (-1 / 11) + N ** (-23 / 22))


def test_leitmann_discrepancy_q_cap():
    f = LeitmannFunction.power(Fraction(21, 20))
    with pytest.raises(QTooLarge):
        leitmann_discrepancy(f, 4, 10 ** 4)  # cap is ceil(10^(4/11)) = 3


def test_unit_sequence_validation():
    with pytest.raises(ValueError):
        UnitSequence(np.array([]))
    with pytest.raises(ValueError):
        UnitSequence(np.array([1.0]))
    with pytest.raises(ValueError):
        UnitSequence(np.array([-0.1]))
