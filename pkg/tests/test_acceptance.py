"""Acceptance gate: one test per primary criterion, each at its stated tolerance and time budget.

Run alone with ``pytest tests/test_acceptance.py -v``; the PASS/FAIL lines
are repeated in the terminal summary.
"""

import time
import warnings

import numpy as np
import pytest

from helpers import counts_close, record
from sympindex.angles import SurdSum
from sympindex.decompose import conjugate, extract_counts, random_symplectic
from sympindex.errors import PrecisionWarning
from sympindex.forms import realize_seed
from sympindex.iteration import iterate_index, iterate_index_array, iterate_nullity_array, mean_index, mean_index_exact
from sympindex.oracles import CrossingOracle, build_path, nullity_table
from sympindex.r8 import claim1_scan, default_families, enumerate_configs, lemma31_scan, seed_of
from sympindex.sampling import random_seed

CENSUS = [(3, 0, 0, 0), (2, 1, 0, 0), (1, 2, 0, 0), (0, 3, 0, 0), (1, 0, 0, 1), (0, 1, 0, 1), (1, 0, 1, 0), (0, 1, 1, 0)]


def _kinds_present(seeds):
    c = [s.counts for s in seeds]
    kinds = {f for f in ("p_minus", "p_zero", "p_plus", "q_minus", "q_zero", "q_plus", "r", "r_star", "r_zero", "s")
             if any(getattr(x, f) for x in c)}
    angle_kinds = {a.kind for x in c for a in (*x.theta_list, *x.alpha_list, *x.beta_list)}
    tails = {x.hyperbolic_tail for x in c if x.s}
    return kinds, angle_kinds, tails


@pytest.fixture(scope="module")
def grid_report():
    t0 = time.perf_counter()
    rep = lemma31_scan(i_range=(-15, 15), m_max=1000, angle_samples=100, enforce_hypothesis=True, rng_seed=0)
    return rep, time.perf_counter() - t0


def test_nullity_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    seeds = [random_seed(rng, label=f"s{k}") for k in range(500)]
    bad = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        for s in seeds:
            if not np.array_equal(nullity_table(realize_seed(s), 60), iterate_nullity_array(s, 60)):
                bad.append(s.label)
    dt = time.perf_counter() - t0
    kinds, angle_kinds, _ = _kinds_present(seeds)
    ok = not bad and dt <= 60 and len(kinds) == 10 and "rational" in angle_kinds
    record("nullity oracle, 500 seeds, m <= 60", ok, dt, f"mismatches={len(bad)} block kinds={len(kinds)}/10")
    assert ok, bad[:10]


def test_m1_identity():
    rng = np.random.default_rng(7)
    seeds = [random_seed(rng) for _ in range(10_000)]
    t0 = time.perf_counter()
    bad = sum(iterate_index(s, 1) != s.i1 for s in seeds)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt <= 5
    record("m = 1 identity, 10^4 seeds", ok, dt, f"mismatches={bad}")
    assert ok


def test_crossing_oracle():
    rng = np.random.default_rng(99)
    t0 = time.perf_counter()
    oracle = CrossingOracle()
    seeds = [random_seed(rng, label=f"s{k}") for k in range(60)]
    bad = []
    for s in seeds:
        idx = oracle.indices(build_path(s, periods=20))
        if not np.array_equal(idx, iterate_index_array(s, 20)):
            bad.append(s.label)
    dt = time.perf_counter() - t0
    kinds, _, tails = _kinds_present(seeds)
    ok = not bad and dt <= 600 and len(kinds) == 10 and tails == {"D2", "D-2"}
    record("crossing oracle, 60 seeds, m <= 20, one calibration", ok, dt,
           f"offset={oracle.offset} mismatches={len(bad)} block kinds={len(kinds)}/10")
    assert ok, bad


def test_mean_index_limit():
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    m = 100_000
    worst = 0.0
    bad = 0
    for _ in range(100):
        s = random_seed(rng, angle_kinds=("surd", "rational"))
        dev = abs(iterate_index(s, m) / m - mean_index(s))
        worst = max(worst, dev * m / (2 * s.n + 2))
        bad += dev > (2 * s.n + 2) / m
    exact_bad = 0
    for fam in default_families():
        cfg = fam.config
        expect = SurdSum.rational(cfg.i_viterbo + 5 - cfg.r)
        for a in cfg.thetas:
            expect = expect + a.turn * 2
        exact_bad += mean_index_exact(seed_of(cfg)) != expect
    dt = time.perf_counter() - t0
    ok = bad == 0 and exact_bad == 0
    record("mean index limit at m = 10^5, 100 seeds; exact R^8 mean identity", ok, dt,
           f"worst deviation/(2n+2)m^-1={worst:.3f} exact mismatches={exact_bad}")
    assert ok


def test_configuration_census():
    t0 = time.perf_counter()
    got = enumerate_configs()
    ok = got == CENSUS
    record("configuration census", ok, time.perf_counter() - t0, f"count={len(got)}")
    assert ok


def test_no_good_iterate_of_index_minus5(grid_report):
    rep, dt = grid_report
    t0 = time.perf_counter()
    relaxed = lemma31_scan(i_range=(-15, 15), m_max=1000, angle_samples=5, enforce_hypothesis=False)
    dt += time.perf_counter() - t0
    witness = [w for w in relaxed.witnesses if w["blocks"] == [0, 3, 0, 0] and w["i_viterbo"] == -5]
    checks = {k: v["passed"] for k, v in rep.checks.items()}
    ok = rep.holds and not rep.violations and all(checks.values()) and bool(witness) and dt <= 300
    record("no good iterate of index -5 (full grid) and relaxed witness", ok, dt,
           f"points={rep.points_scanned} violations={len(rep.violations)} witnesses={len(relaxed.witnesses)}")
    assert ok, checks


def test_zero_mean_families():
    t0 = time.perf_counter()
    rep = claim1_scan(m_max=10_000)
    dt = time.perf_counter() - t0
    by_label = {f["label"]: f for f in rep.families}
    r0r2 = [f for f in rep.families if f["blocks"][0] in (0, 2) and f["turn_sum"] in ("0", "1")]
    r3 = [f for f in rep.families if f["blocks"][0] == 3]
    ok = (
        rep.holds
        and all(f["good_index_values"] == [-5] for f in r0r2)
        and all(set(f["good_index_values"]) <= {-6, -4} for f in r3)
        and all(set(f["fractional_sum_values"]) <= {"1", "2"} for f in r3)
        and rep.checks["r1_infeasible"]["passed"]
        and dt <= 120
    )
    record("zero-mean families up to m = 10^4", ok, dt, f"families={len(by_label)}")
    assert ok, rep.checks


def test_decomposer_round_trip():
    rng = np.random.default_rng(31)
    t0 = time.perf_counter()
    bad = []
    for k in range(500):
        s = random_seed(rng, characteristic=True)
        p = random_symplectic(rng, s.n, max_cond=1e3)
        got = extract_counts(conjugate(realize_seed(s), p))
        if not counts_close(got, s.counts, atol=1e-6):
            bad.append(k)
    dt = time.perf_counter() - t0
    ok = not bad and dt <= 60
    record("decomposer round trip, 500 trials", ok, dt, f"failures={len(bad)}")
    assert ok, bad


def test_two_path_agreement(grid_report):
    rep, dt = grid_report
    chk = rep.checks["two_path_agreement"]
    ok = chk["passed"] and chk["mismatches"] == 0 and chk["points"] == rep.points_scanned
    record("two-path index agreement on the full grid", ok, dt, f"points={chk['points']} mismatches={chk['mismatches']}")
    assert ok
