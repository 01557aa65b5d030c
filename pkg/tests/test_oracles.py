import numpy as np
import pytest

from helpers import constant_seed, surd, surd_r3_seed
from sympindex.angles import Angle
from sympindex.errors import ParityError
from sympindex.forms import D, R, SymplecticMatrix, make_seed, realize, realize_seed
from sympindex.iteration import iterate_index, iterate_index_array, iterate_nullity_array, mean_index
from sympindex.oracles import (
    CrossingOracle,
    build_path,
    crossing_index,
    default_oracle,
    endpoint_matches,
    mean_index_limit,
    nullity_oracle,
    nullity_table,
)
from sympindex.sampling import random_seed


def test_nullity_oracle_examples():
    d2 = realize(D(2.0))
    assert all(nullity_oracle(d2, k) == 0 for k in range(1, 10))
    r = realize(R(Angle.rational(3, 7)))
    assert nullity_oracle(r, 7) == 2
    assert nullity_oracle(r, 6) == 0


def test_nullity_table_matches_pointwise(rng):
    s = random_seed(rng, angle_kinds=("rational",))
    m = realize_seed(s)
    table = nullity_table(m, 24)
    assert [nullity_oracle(m, k) for k in range(1, 25)] == list(table)


@pytest.mark.filterwarnings("ignore::sympindex.errors.PrecisionWarning")
def test_nullity_oracle_agrees_with_formula(rng):
    for _ in range(60):
        s = random_seed(rng)
        assert np.array_equal(nullity_table(realize_seed(s), 60), iterate_nullity_array(s, 60))


def test_path_iterate_law():
    s = surd_r3_seed()
    path = build_path(s, periods=3)
    g1 = path.endpoint(1)
    assert np.allclose(path.endpoint(3), np.linalg.matrix_power(g1, 3), atol=1e-10)
    assert np.allclose(path.at(2.5), path.at(0.5) @ np.linalg.matrix_power(g1, 2), atol=1e-10)
    assert endpoint_matches(s, path)


def test_path_ends_at_realized_seed(rng):
    for _ in range(20):
        s = random_seed(rng)
        assert endpoint_matches(s, build_path(s))


def test_calibration_point():
    oracle = CrossingOracle()
    assert oracle.offset == 0
    assert crossing_index(build_path(oracle.reference)) == oracle.reference.i1


def test_constant_seed_crossings():
    idx = default_oracle().indices(build_path(constant_seed(), periods=10))
    assert list(idx) == [-1] * 10


def test_surd_seed_crossings():
    s = surd_r3_seed()
    idx = default_oracle().indices(build_path(s, periods=20))
    assert np.array_equal(idx, iterate_index_array(s, 20))


def test_crossing_matches_formula_all_kinds(rng):
    oracle = default_oracle()
    for _ in range(8):
        s = random_seed(rng, n_range=(2, 4))
        idx = oracle.indices(build_path(s, periods=12))
        assert np.array_equal(idx, iterate_index_array(s, 12)), s


def test_other_seeds_agree_at_m1(rng):
    oracle = default_oracle()
    for _ in range(10):
        s = random_seed(rng)
        assert crossing_index(build_path(s), oracle) == s.i1


def test_unreachable_index_rejected():
    # one rotation plus a D(2) tail: every explicit path has odd index
    s = make_seed(2, 0, r=1, s=1, theta_list=(surd("sqrt(2)-1"),))
    with pytest.raises(ParityError):
        build_path(s)


def test_mean_index_limit():
    const = constant_seed()
    for m_max in (1000, 5000, 100_000):
        # i(gamma, m) = -1 for all m, mean index i1 + 1 = 0
        assert mean_index_limit(const, m_max) == pytest.approx(-1 / m_max)
        assert abs(mean_index_limit(const, m_max) - (const.i1 + 1)) <= 1 / m_max
    with pytest.raises(ValueError):
        mean_index_limit(const, 10)
    zero = surd_r3_seed()
    assert mean_index(zero) == 0.0
    for m_max in (1000, 10_000):
        assert abs(mean_index_limit(zero, m_max)) <= 10 / m_max


def test_mean_index_limit_random(rng):
    for _ in range(30):
        s = random_seed(rng)
        assert abs(mean_index_limit(s, 10_000) - mean_index(s)) <= 10 / 10_000
