import numpy as np
import pytest

from posmap.corpus import cyclic_diagonal_map
from posmap.decomp import (
    Decomposed,
    Inconclusive,
    WitnessFound,
    classify_decomposability,
    decompose_search,
    ppt_witness_search,
    verify_witness,
)
from posmap.linalg import partial_transpose_first
from posmap.mapcore import choi_example, identity_map, random_decomposable, scale_add, to_choi, trace_map, transpose_map

cp = pytest.importorskip("cvxpy")


def sdp_min_witness_value(phi):
    """min Tr(J W) over unit-trace W with W >= 0 and PT(W) >= 0."""
    J = to_choi(phi)
    n = J.shape[0]
    W = cp.Variable((n, n), hermitian=True)
    cons = [W >> 0, cp.partial_transpose(W, [phi.k, phi.h], 0) >> 0, cp.real(cp.trace(W)) == 1]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(J @ W))), cons)
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)
    return prob.value


def check_decomposition(phi, d):
    J = to_choi(phi)
    assert np.linalg.eigvalsh(d.S1)[0] >= -1e-8
    assert np.linalg.eigvalsh(d.S2)[0] >= -1e-8
    assert np.linalg.norm(J - d.S1 - partial_transpose_first(d.S2, phi.k, phi.h)) <= 1e-8


def test_choi_witness_matches_sdp():
    phi = choi_example()
    res = ppt_witness_search(phi)
    assert isinstance(res, WitnessFound)
    assert res.value == pytest.approx(sdp_min_witness_value(phi), abs=1e-5)
    W = res.W
    assert np.linalg.eigvalsh(W)[0] >= -1e-10
    assert np.linalg.eigvalsh(partial_transpose_first(W, 3, 3))[0] >= -1e-10
    assert np.trace(W).real == pytest.approx(1.0)


def test_trivial_decompositions():
    for phi in (identity_map(3), transpose_map(3)):
        d = decompose_search(phi)
        assert isinstance(d, Decomposed) and d.residual == 0.0
        check_decomposition(phi, d)


def test_random_sums_decompose(rng):
    for k, h, a, b in [(2, 2, 2, 2), (2, 3, 1, 2), (3, 3, 2, 2), (3, 3, 3, 1)]:
        phi = random_decomposable(k, h, rng, a, b)
        d = decompose_search(phi)
        assert isinstance(d, Decomposed)
        check_decomposition(phi, d)


@pytest.mark.parametrize("abc", [(1.5, 1.0, 0.25), (1.5, 1.0, 0.1), (1.2, 1.0, 0.3), (1.0, 2.0, 1.0), (2.0, 0.0, 1.0), (1.8, 0.5, 0.5)])
def test_cyclic_family_verdicts_match_sdp(abc):
    phi = cyclic_diagonal_map(*abc)
    out = classify_decomposability(phi)
    oracle = sdp_min_witness_value(phi)
    if isinstance(out["primal"], Decomposed):
        check_decomposition(phi, out["primal"])
        assert oracle >= -1e-6
    if isinstance(out["dual"], WitnessFound):
        assert oracle <= -1e-6
        assert out["dual"].value == pytest.approx(oracle, abs=1e-5)
    assert not (isinstance(out["primal"], Decomposed) and isinstance(out["dual"], WitnessFound))
    assert out["verdict"] != "inconclusive" or abs(oracle) < 1e-5


def test_choi_plus_trace_threshold():
    base = ppt_witness_search(choi_example()).value
    # adding t Tr(X) I shifts every unit-trace witness value by t
    small = classify_decomposability(scale_add(1.0, choi_example(), -base - 0.02, trace_map(3)))
    large = classify_decomposability(scale_add(1.0, choi_example(), -base + 0.02, trace_map(3)))
    assert small["verdict"] == "nondecomposable"
    assert small["dual"].value == pytest.approx(-0.02, abs=1e-7)
    assert large["verdict"] == "decomposable"


def test_verify_witness_repairs_small_negativity():
    phi = choi_example()
    W = ppt_witness_search(phi).W
    noisy = W - 1e-6 * np.eye(9)
    Wr, v, ok = verify_witness(phi, noisy)
    assert ok
    assert np.linalg.eigvalsh(Wr)[0] >= -1e-12
    assert v == pytest.approx(np.trace(to_choi(phi) @ Wr).real)


def test_decomposable_maps_have_no_witness(rng):
    for _ in range(5):
        phi = random_decomposable(3, 3, rng, 2, 2)
        res = ppt_witness_search(phi)
        assert isinstance(res, Inconclusive)
        assert res.best_witness_value >= -1e-8
