import numpy as np
import pytest
from fractions import Fraction

from primegaps.irrational import NamedConstant, QuadraticSurd
from primegaps.sequences import BeattySpec
from primegaps.sieve import build_table

# one shared table large enough for every experiment in the suite
TABLE_LIMIT = 20_100_000


@pytest.fixture(scope="session")
def sqrt2():
    return QuadraticSurd(0, 1, 2)


@pytest.fixture(scope="session")
def golden():
    return QuadraticSurd(1, 1, 5, 2)


@pytest.fixture(scope="session")
def pi_spec():
    return NamedConstant("pi")


@pytest.fixture(scope="session")
def spec_half(sqrt2):
    return BeattySpec(sqrt2, 0, Fraction(1, 2))


@pytest.fixture(scope="session")
def table():
    return build_table(TABLE_LIMIT)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
