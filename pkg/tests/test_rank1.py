import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posmap.linalg import numerical_rank, random_complex, random_unit
from posmap.mapcore import choi_example, from_cokraus, from_functional, from_kraus, identity_map, transpose_map, zero_map
from posmap.rank1 import (
    CoKraus,
    Functional,
    Kraus,
    NotRankOne,
    lemma_classify,
    lemma_rank_scan,
    phase_aligned_error,
    rank_profile,
    rebuild,
    classify_rank1,
)
from strategies import kraus_maps, lemma_instance, seeds


@settings(max_examples=40)
@given(kraus_maps())
def test_kraus_recovered_up_to_phase(pair):
    phi, A = pair
    cls = classify_rank1(phi, samples=30)
    assert isinstance(cls, Kraus)
    assert phase_aligned_error(cls.B, A) <= 1e-8


@settings(max_examples=40)
@given(kraus_maps(co=True))
def test_cokraus_recovered_up_to_phase(pair):
    phi, C = pair
    cls = classify_rank1(phi, samples=30)
    assert isinstance(cls, CoKraus)
    assert phase_aligned_error(cls.C, C) <= 1e-8


def test_functional_times_projection(rng):
    G = random_complex((3, 3), rng)
    M = G @ G.conj().T
    q = random_unit(2, rng)
    phi = from_functional(M, np.outer(q, q.conj()))
    cls = classify_rank1(phi)
    assert isinstance(cls, Functional)
    assert np.allclose(rebuild(cls).blocks, phi.blocks)


def test_pure_functional_reports_kraus(rng):
    # omega(X) = <a, X a> times a projection is also a single Kraus map
    a, q = random_unit(3, rng), random_unit(2, rng)
    phi = from_kraus(np.outer(q, a.conj()))
    assert isinstance(classify_rank1(phi), Kraus)


def test_not_rank_one_examples():
    cls = classify_rank1(choi_example())
    assert isinstance(cls, NotRankOne)
    E11 = np.zeros((3, 3))
    E11[0, 0] = 1
    assert np.allclose(cls.witness, E11)
    assert cls.observed_rank == 2
    assert rank_profile(choi_example()).max_rank == 3
    assert isinstance(classify_rank1(transpose_map(2)), CoKraus)
    assert isinstance(classify_rank1(identity_map(2)), Kraus)
    z = classify_rank1(zero_map(2, 3))
    assert isinstance(z, Kraus) and not z.B.any()


def test_sum_of_two_kraus_is_not_rank_one(rng):
    A, B = random_complex((3, 3), rng), random_complex((3, 3), rng)
    phi = from_kraus(A) + from_kraus(B)
    assert isinstance(classify_rank1(phi), NotRankOne)


@given(st.sampled_from("abcd"), st.integers(2, 4), seeds)
def test_admissible_forms_have_rank_at_most_one(case, n, s):
    x, y, A, name = lemma_instance(case, n, np.random.default_rng(s))
    ok, (lam, r) = lemma_rank_scan(x, y, A, lam_samples=16)
    assert ok, (lam, r)
    assert type(lemma_classify(x, y, A, lam_samples=16)).__name__ == name


@given(st.integers(2, 4), seeds)
def test_rejected_forms_give_rank_two_witness(n, s):
    x, y, A, _ = lemma_instance("reject", n, np.random.default_rng(s))
    ok, (lam, r) = lemma_rank_scan(x, y, A)
    assert not ok and r >= 2
    R = np.outer(x, x.conj()) + abs(lam) ** 2 * np.outer(y, y.conj()) + lam * A + np.conj(lam) * A.conj().T
    assert numerical_rank(R, scale=None) >= 2
    assert type(lemma_classify(x, y, A)).__name__ == "NoCase"


def test_indep_coefficient_recovered():
    x, y = np.array([1, 0, 0], complex), np.array([0, 1, 0], complex)
    c = lemma_classify(x, y, 1j * np.outer(y, x.conj()))
    assert c.orientation == "yx_star" and c.mu == pytest.approx(1j)
