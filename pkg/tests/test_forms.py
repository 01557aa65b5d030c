import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sympindex.angles import Angle
from sympindex.errors import DomainError, InconsistencyError
from sympindex.forms import (
    D,
    N1,
    N2,
    R,
    IndexSeed,
    NormalFormCounts,
    SymplecticMatrix,
    block_parity,
    diamond_sum,
    is_symplectic,
    make_seed,
    realize,
    realize_seed,
    standard_j,
    triviality_sign,
)

from helpers import surd



def test_diamond_identity():
    assert np.array_equal(diamond_sum(np.eye(2), np.eye(2)), np.eye(4))


def test_diamond_n1_d2():
    out = diamond_sum(realize(N1(1, 1)).entries, realize(D(2)).entries)
    expect = np.array([[1, 0, 1, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0.5]])
    assert np.array_equal(out, expect)


def test_realize_examples():
    assert np.array_equal(realize(N1(1, 1)).entries, [[1, 1], [0, 1]])
    assert np.allclose(realize(R(Angle.rational(1, 4))).entries, [[0, -1], [1, 0]], atol=1e-15)


def test_n2_flag_checked():
    angle = Angle.rational(1, 6)
    ok = N2.from_entries(angle, 0.0, 1.0, 0.0)
    assert ok.trivial
    with pytest.raises(DomainError):
        N2(angle, ok.b, trivial=False)


def test_n2_symplectic_constraint():
    with pytest.raises(DomainError):
        N2(Angle.rational(1, 6), (0.0, 1.0, 0.0, 0.0), trivial=True)


def test_triviality_sign_rule():
    third = Angle.rational(1, 6)
    assert triviality_sign(np.array([[0, 1], [0, 0]]), third) == "trivial"
    assert triviality_sign(np.array([[0, 0], [1, 0]]), third) == "nontrivial"
    with pytest.raises(DomainError):
        triviality_sign(np.array([[0, 1], [1, 0]]), third)


def test_is_symplectic_examples():
    assert is_symplectic(standard_j(1))
    assert is_symplectic(realize(N1(-1, 1)))
    assert not is_symplectic(np.diag([2.0, 3.0]))
    with pytest.raises(DomainError):
        SymplecticMatrix(np.diag([2.0, 3.0]))


def test_rejects_pi_and_unit_d():
    with pytest.raises(DomainError):
        R(Angle.rational(1, 2))
    with pytest.raises(DomainError):
        D(-1.0)


def test_seed_realization_examples():
    one = make_seed(1, 1, p_minus=1)
    assert np.array_equal(realize_seed(one).entries, [[1, 1], [0, 1]])
    thetas = tuple(surd(e) for e in ("sqrt(2)-1", "sqrt(3)-1", "4-sqrt(2)-sqrt(3)"))
    m = realize_seed(make_seed(4, -2, p_minus=1, r=3, theta_list=thetas))
    assert m.entries.shape == (8, 8) and is_symplectic(m)
    hyp = realize_seed(make_seed(4, -1, p_minus=1, s=3))
    parts = [realize(N1(1, 1)).entries] + [realize(D(2)).entries] * 3
    expect = parts[0]
    for p in parts[1:]:
        expect = diamond_sum(expect, p)
    assert np.array_equal(hyp.entries, expect)


def test_block_parity_examples():
    thetas = tuple(surd(e) for e in ("sqrt(2)-1", "sqrt(3)-1", "sqrt(5)-2"))
    assert block_parity(make_seed(4, 0, p_minus=1, r=3, theta_list=thetas)) == "even"
    assert block_parity(make_seed(1, 0, p_plus=1)) == "even"
    assert block_parity(make_seed(4, 3, p_minus=1, s=3)) == "unconstrained"


def test_seed_budget_and_parity_checked():
    with pytest.raises(InconsistencyError):
        make_seed(3, 1, p_minus=1)
    with pytest.raises(InconsistencyError):
        make_seed(1, 0, p_minus=1)


def test_seed_json_round_trip():
    s = make_seed(3, 1, p_minus=1, r_star=1, alpha_list=(surd("sqrt(2)-1"),))
    assert IndexSeed.from_json(s.to_json()) == s
    assert NormalFormCounts.from_json(s.counts.to_json()) == s.counts


def test_matrix_json_round_trip():
    m = realize(N1(1, 1))
    assert SymplecticMatrix.from_json(m.to_json()) == m


blocks = st.one_of(
    st.builds(N1, st.sampled_from([1, -1]), st.sampled_from([-1.0, 0.0, 1.0])),
    st.builds(D, st.sampled_from([2.0, -2.0, 3.5, -0.25])),
    st.builds(R, st.sampled_from([Angle.rational(1, 3), surd("sqrt(2)-1"), Angle.from_float(2.0)])),
    st.builds(
        N2.canonical,
        st.sampled_from([Angle.rational(1, 5), surd("sqrt(3)-1")]),
        st.booleans(),
    ),
)


@settings(max_examples=300, deadline=None)
@given(blocks, blocks, blocks)
def test_diamond_preserves_symplecticity_and_associates(a, b, c):
    ma, mb, mc = a.matrix(), b.matrix(), c.matrix()
    assert is_symplectic(ma, 1e-12)
    left = diamond_sum(diamond_sum(ma, mb), mc)
    right = diamond_sum(ma, diamond_sum(mb, mc))
    assert np.array_equal(left, right)
    assert is_symplectic(left, 1e-9)


def test_realized_dimension(rng):
    from sympindex.sampling import random_seed

    for _ in range(50):
        s = random_seed(rng)
        c = s.counts
        half = c.p_minus + c.p_zero + c.p_plus + c.q_minus + c.q_zero + c.q_plus + c.r + 2 * c.r_star + 2 * c.r_zero + c.s
        assert realize_seed(s).entries.shape == (2 * half, 2 * half)


def test_nullity_one_matches_kernel(rng):
    from sympindex.sampling import random_seed

    for _ in range(100):
        s = random_seed(rng)
        m = realize_seed(s).entries
        sv = np.linalg.svd(m - np.eye(len(m)), compute_uv=False)
        assert int(np.sum(sv <= 1e-8 * max(1.0, sv[0]))) == s.nullity_one
