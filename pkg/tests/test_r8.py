import itertools

import numpy as np
import pytest

from helpers import surd
from sympindex.angles import SurdSum, frac_parts_sum
from sympindex.errors import DomainError, InconsistencyError
from sympindex.iteration import iterate_index, mean_index_exact, viterbo_from_maslov
from sympindex.r8 import (
    R8Config,
    claim1_scan,
    default_families,
    enumerate_configs,
    generic_viterbo_array,
    lemma31_scan,
    mean_index_dichotomy,
    parity_admissible,
    r8_index,
    r8_index_array,
    seed_of,
    zero_mean_family,
)

CENSUS = [
    (3, 0, 0, 0),
    (2, 1, 0, 0),
    (1, 2, 0, 0),
    (0, 3, 0, 0),
    (1, 0, 0, 1),
    (0, 1, 0, 1),
    (1, 0, 1, 0),
    (0, 1, 1, 0),
]

SURD_THETAS = tuple(surd(e) for e in ("sqrt(2)-1", "sqrt(3)-1", "4-sqrt(2)-sqrt(3)"))


def test_census_pinned():
    assert enumerate_configs() == CENSUS
    assert enumerate_configs() == enumerate_configs()


def test_census_brute_force():
    found = {c for c in itertools.product(range(4), range(4), range(2), range(2)) if c[0] + c[1] + 2 * c[2] + 2 * c[3] == 3}
    assert found == set(CENSUS)


def test_constant_family():
    cfg = R8Config(0, 3, 0, 0, -5)
    assert all(r8_index(cfg, m) == -5 for m in range(1, 100))


def test_surd_r3_values():
    cfg = R8Config(3, 0, 0, 0, -6, SURD_THETAS)
    assert r8_index(cfg, 2) == -6
    assert r8_index(cfg, 3) == -4
    assert [a.floor_mul(3) for a in SURD_THETAS] == [1, 2, 2]


def test_m1_identity():
    for blocks in CENSUS:
        r, s, rs, rz = blocks
        thetas = SURD_THETAS[:r]
        alphas = (surd("sqrt(5)-2"),) * rs
        betas = (surd("sqrt(7)-2"),) * rz
        for i in range(-9, 10):
            if not parity_admissible(blocks, i):
                with pytest.raises(InconsistencyError):
                    R8Config(r, s, rs, rz, i, thetas, alphas, betas)
                continue
            assert r8_index(R8Config(r, s, rs, rz, i, thetas, alphas, betas), 1) == i


def test_two_paths_agree():
    for blocks in CENSUS:
        r, s, rs, rz = blocks
        cfg = R8Config(r, s, rs, rz, 1 + r if s == 0 else 2, SURD_THETAS[:r],
                       (surd("sqrt(5)-2"),) * rs, (surd("sqrt(7)-2"),) * rz)
        assert np.array_equal(r8_index_array(cfg, 500), generic_viterbo_array(cfg, 500))
        assert r8_index(cfg, 37) == viterbo_from_maslov(iterate_index(seed_of(cfg), 37), 4)


def test_config_validation():
    with pytest.raises(InconsistencyError):
        R8Config(3, 1, 0, 0, 0, SURD_THETAS)
    with pytest.raises(DomainError):
        from sympindex.angles import Angle

        R8Config(1, 2, 0, 0, 0, (Angle.rational(1, 3),))


def test_dichotomy():
    assert mean_index_dichotomy(R8Config(0, 3, 0, 0, 0)) == "diverges_up"
    assert mean_index_dichotomy(R8Config(0, 3, 0, 0, -5)) == "zero_family"
    assert mean_index_dichotomy(R8Config(3, 0, 0, 0, -8, SURD_THETAS)) == "diverges_down"


def test_mean_identity_exact():
    for fam in default_families():
        cfg = fam.config
        expect = SurdSum.rational(cfg.i_viterbo + 5 - cfg.r)
        for a in cfg.thetas:
            expect = expect + a.turn * 2
        assert mean_index_exact(seed_of(cfg)) == expect == SurdSum.rational(0)


def test_zero_mean_construction_rejects_off_resonance():
    with pytest.raises(DomainError):
        zero_mean_family("bad", (1, 2, 0, 0), (surd("sqrt(2)-1"),))


def test_r3_fractional_sums():
    for m in range(1, 400):
        total = frac_parts_sum(SURD_THETAS, m)
        assert total.is_rational() and total in (SurdSum.rational(1), SurdSum.rational(2))


def test_minus5_scan_small_grids():
    for m_max, samples in ((50, 5), (200, 10)):
        rep = lemma31_scan(i_range=(-9, 9), m_max=m_max, angle_samples=samples, workers=1)
        assert rep.holds and not rep.violations
        assert all(c["passed"] for c in rep.checks.values())


def test_relaxed_scan_has_constant_witness():
    rep = lemma31_scan(i_range=(-7, -3), m_max=30, angle_samples=3, enforce_hypothesis=False, workers=1)
    hits = [w for w in rep.witnesses if w["blocks"] == [0, 3, 0, 0] and w["i_viterbo"] == -5]
    assert hits and hits[0]["points"] == 3 * 30


def test_scan_is_deterministic():
    a = lemma31_scan(i_range=(-3, 3), m_max=40, angle_samples=4, workers=1).to_json()
    b = lemma31_scan(i_range=(-3, 3), m_max=40, angle_samples=4, workers=2).to_json()
    assert a == b


def test_zero_mean_scan_small():
    rep = claim1_scan(m_max=500)
    assert rep.holds
    assert all(c["passed"] for c in rep.checks.values())
    outcomes = {f["label"]: f["good_index_values"] for f in rep.families}
    assert outcomes["r0 hyperbolic"] == [-5]
    assert outcomes["r3 sum 2"] == [-6, -4]
