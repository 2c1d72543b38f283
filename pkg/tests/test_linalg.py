import numpy as np
import pytest
from hypothesis import given, strategies as st

from posmap.errors import DimensionMismatch, NonFinite, NonSquare
from posmap.linalg import (
    ToleranceConfig,
    as_matrix,
    eig_hermitian,
    fix_phase,
    is_psd,
    min_eig,
    numerical_rank,
    partial_transpose_first,
    proj_psd,
    random_complex,
    top_eigpair,
    unit,
)
from strategies import hermitian, seeds


def naive_pt(J, k, h):
    out = np.zeros_like(J)
    for i in range(k):
        for j in range(k):
            out[i * h:(i + 1) * h, j * h:(j + 1) * h] = J[j * h:(j + 1) * h, i * h:(i + 1) * h]
    return out


@given(st.integers(1, 4), st.integers(1, 4), seeds)
def test_partial_transpose_matches_blockwise_swap(k, h, s):
    J = random_complex((k * h, k * h), np.random.default_rng(s))
    P = partial_transpose_first(J, k, h)
    assert np.array_equal(P, naive_pt(J, k, h))
    assert np.array_equal(partial_transpose_first(P, k, h), J)


def test_partial_transpose_of_swap_is_unnormalized_bell():
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[i * 2 + j, j * 2 + i] = 1
    P = partial_transpose_first(swap, 2, 2)
    w = np.linalg.eigvalsh(P)
    assert np.allclose(w, [0, 0, 0, 2])


@given(hermitian())
def test_eigh_reconstructs(H):
    w, V = eig_hermitian(H)
    assert np.allclose((V * w) @ V.conj().T, H, atol=1e-10)
    assert np.all(np.diff(w) >= 0)


@given(hermitian())
def test_proj_psd_is_psd_and_idempotent(H):
    P = proj_psd(H)
    assert min_eig(P) >= -1e-10
    assert np.allclose(proj_psd(P), P, atol=1e-10)
    # nearest point: residual is negative semidefinite and orthogonal to P
    R = H - P
    assert np.linalg.eigvalsh(R).max() <= 1e-10
    assert abs(np.trace(R @ P)) <= 1e-8 * max(1.0, np.linalg.norm(H) ** 2)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6), seeds)
def test_numerical_rank_of_products(m, n, r, s):
    rng = np.random.default_rng(s)
    r = min(r, m, n)
    M = random_complex((m, r), rng) @ random_complex((r, n), rng)
    assert numerical_rank(M) == r


def test_numerical_rank_scale_ignores_cancellation():
    big = np.diag([1e9, 0.0])
    M = (big + np.diag([0.0, 1e-3])) - big
    assert numerical_rank(M) == 1
    assert numerical_rank(M, scale=1e9) == 0


def test_is_psd_threshold():
    tol = ToleranceConfig(eps_psd=1e-6)
    assert is_psd(np.diag([1.0, -1e-7]), tol)[0]
    assert not is_psd(np.diag([1.0, -1e-5]), tol)[0]


def test_top_eigpair_degenerate_is_canonical():
    lam, x = top_eigpair(np.diag([2.0, 2.0, 1.0]))
    assert lam == pytest.approx(2.0)
    assert np.allclose(x, [1, 0, 0])
    U = np.linalg.qr(random_complex((3, 3), np.random.default_rng(3)))[0]
    Y = U @ np.diag([1.0, 5.0, 5.0]) @ U.conj().T
    lam, x = top_eigpair(Y)
    lam2, x2 = top_eigpair(Y + 1e-15 * np.eye(3))
    assert lam == pytest.approx(5.0)
    assert np.allclose(x, x2, atol=1e-8)


@given(seeds)
def test_fix_phase_makes_leading_entry_real(s):
    v = fix_phase(random_complex(4, np.random.default_rng(s)))
    assert abs(v[0].imag) < 1e-12 and v[0].real > 0


def test_coercion_errors():
    with pytest.raises(NonSquare):
        as_matrix(np.zeros((2, 3)), square=True)
    with pytest.raises(NonFinite):
        as_matrix([[np.nan]])
    with pytest.raises(DimensionMismatch):
        as_matrix(np.zeros(3))
    with pytest.raises(DimensionMismatch):
        partial_transpose_first(np.zeros((4, 4)), 3, 1)
    with pytest.raises(ValueError):
        unit(np.zeros(2))


def test_tolerance_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(eps_psd=-1)
    with pytest.raises(ValueError):
        ToleranceConfig(opt_tol=0)
    assert ToleranceConfig().as_dict()["max_iters"] == 500
