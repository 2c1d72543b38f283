"""Decomposability of a map as CP plus co-CP, and PPT witnesses against it.

The Choi matrices of decomposable maps form the cone ``PSD + PT(PSD)`` whose
dual is the cone of PPT operators ``{W >= 0, PT(W) >= 0}``. The two searches
below attack the primal and the dual side:

* ``decompose_search`` looks for ``J = S1 + PT(S2)`` with both parts PSD by
  Dykstra's alternating projections;
* ``ppt_witness_search`` minimizes ``Tr(J W)`` over unit-trace PPT ``W`` by
  an operator-splitting gradient method. A negative value after exact
  verification certifies that the map is not decomposable.

Neither search is complete, so ``Inconclusive`` is a legitimate outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .linalg import DEFAULT_TOL, ToleranceConfig, hermitian_part, min_eig, partial_transpose_first, proj_psd, random_complex
from .mapcore import LinearMap, to_choi


@dataclass
class Decomposed:
    S1: np.ndarray
    S2: np.ndarray
    residual: float


@dataclass
class WitnessFound:
    W: np.ndarray
    value: float


@dataclass
class Inconclusive:
    iterations: int
    best_residual: float
    best_witness_value: float


def _pt(phi: LinearMap):
    k, h = phi.k, phi.h
    return lambda M: partial_transpose_first(M, k, h)


def _finish(J, S1, pt, tol):
    """Turn a candidate ``S1`` into a decomposition with both parts exactly PSD."""
    S1 = proj_psd(S1)
    S2 = hermitian_part(pt(J - S1))
    if min_eig(S2) >= -tol.eps_psd:
        return Decomposed(S1, S2, float(np.linalg.norm(J - S1 - pt(S2))))
    P = proj_psd(S2)
    return Decomposed(S1, P, float(np.linalg.norm(J - S1 - pt(P))))


def _psd_factor(S, rank=None):
    w, V = np.linalg.eigh(hermitian_part(S))
    F = V * np.sqrt(np.clip(w, 0.0, None))
    return F if rank is None else F[:, ::-1][:, :rank]


def _effective_rank(S, rel=1e-3):
    w = np.linalg.eigvalsh(hermitian_part(S))
    top = max(float(w[-1]), 0.0)
    return max(1, int(np.sum(w > rel * top))) if top > 0 else 1


def _factored_polish(J, S1, S2, k, h, max_nfev, ranks=None):
    """Least squares on ``J = V V* + PT(W W*)`` started from ``S1, S2``.

    Near a boundary where the two cones only touch, alternating projections
    crawl; the factored residual is a smooth polynomial with a zero at every
    decomposition and Gauss-Newton type steps converge quickly. Both parts
    are PSD by construction. ``ranks`` truncates the factors to ``n x r``;
    full factors over-parameterize low-rank solutions and slow the solver.
    """
    n = J.shape[0]
    m = n * n
    r1, r2 = ranks if ranks is not None else (n, n)
    s1, s2 = n * r1, n * r2
    pt_idx = partial_transpose_first(np.arange(m, dtype=float).reshape(n, n), k, h).real.astype(int).ravel()
    eye = np.eye(n)

    def unpack(z):
        c = z[: s1 + s2] + 1j * z[s1 + s2 :]
        return c[:s1].reshape(n, r1), c[s1:].reshape(n, r2)

    def pack(V, W):
        c = np.concatenate([V.ravel(), W.ravel()])
        return np.concatenate([c.real, c.imag])

    def fun(z):
        V, W = unpack(z)
        r = (J - V @ V.conj().T - partial_transpose_first(W @ W.conj().T, k, h)).ravel()
        return np.concatenate([r.real, r.imag])

    def dprod(V):
        # d(V V*) along E_ab (real) and i E_ab (imaginary), flattened over (c, d)
        A = np.einsum("ca,db->cdab", eye, V.conj())
        B = np.einsum("cb,ad->cdab", V, eye)
        return (A + B).reshape(m, -1), (1j * (A - B)).reshape(m, -1)

    def jac(z):
        V, W = unpack(z)
        vr, vi = dprod(V)
        wr, wi = dprod(W)
        wr, wi = wr[pt_idx], wi[pt_idx]
        # column order follows pack: [Re V, Re W, Im V, Im W]
        Jc = -np.concatenate([vr, wr, vi, wi], axis=1)
        return np.concatenate([Jc.real, Jc.imag], axis=0)

    res = least_squares(
        fun,
        pack(_psd_factor(S1, r1), _psd_factor(S2, r2)),
        jac=jac,
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_nfev,
    )
    V, W = unpack(res.x)
    S1, S2 = V @ V.conj().T, W @ W.conj().T
    return Decomposed(S1, S2, float(np.linalg.norm(J - S1 - partial_transpose_first(S2, k, h))))


def decompose_search(
    phi: LinearMap,
    tol: ToleranceConfig = DEFAULT_TOL,
    max_iters: int = 5000,
    residual_tol: float = 1e-8,
    polish_evals: int = 100,
    rank_evals: int = 40,
    max_rank_pairs: int = 40,
):
    """Find PSD ``S1, S2`` with ``J = S1 + PT(S2)``.

    Dykstra's method alternates between the PSD cone and the shifted cone
    ``{S : PT(J - S) >= 0}``. When it stalls (no halving of the residual
    over 500 sweeps) or hits ``max_iters``, a factored least-squares polish
    starts from its best iterate, first with factors truncated to small
    rank pairs (the iterate overestimates the rank of a boundary solution)
    and then with full factors. Returns ``Decomposed`` once the reassembly
    residual is at most ``residual_tol`` with both parts PSD, else
    ``Inconclusive``.
    """
    J = hermitian_part(to_choi(phi))
    pt = _pt(phi)
    if min_eig(J) >= -tol.eps_psd:
        return Decomposed(J, np.zeros_like(J), 0.0)
    if min_eig(pt(J)) >= -tol.eps_psd:
        return Decomposed(np.zeros_like(J), hermitian_part(pt(J)), 0.0)

    def proj_b(S):
        return J - pt(proj_psd(pt(J - S)))

    S = 0.5 * (J + pt(proj_psd(pt(J))))
    p = np.zeros_like(J)
    q = np.zeros_like(J)
    best = None
    history = []
    it = 0
    for it in range(1, max_iters + 1):
        A = proj_psd(S + p)
        p = S + p - A
        S_new = proj_b(A + q)
        q = A + q - S_new
        S = S_new
        if it % 10 == 0:
            cand = _finish(J, A, pt, tol)
            if best is None or cand.residual < best.residual:
                best = cand
            if best.residual <= residual_tol:
                return best
            history.append(best.residual)
            if len(history) > 50 and history[-1] > 0.5 * history[-51]:
                break
    if best is None:
        best = _finish(J, S, pt, tol)
    if polish_evals > 0:
        # low-rank factors first, smallest total rank first, then full factors
        ra, rb = _effective_rank(best.S1, 1e-6), _effective_rank(best.S2, 1e-6)
        pairs = sorted(((a, b) for a in range(1, ra + 1) for b in range(1, rb + 1)), key=lambda p: (p[0] + p[1], p))
        trials = [(p, rank_evals) for p in pairs[:max_rank_pairs]] + [(None, polish_evals)]
        for rk, evals in trials:
            cand = _factored_polish(J, best.S1, best.S2, phi.k, phi.h, evals, rk)
            if cand.residual < best.residual:
                best = cand
            if best.residual <= residual_tol:
                return best
    return Inconclusive(iterations=it, best_residual=best.residual, best_witness_value=np.nan)


def _proj_psd_unit_trace(H):
    """Frobenius projection onto ``{W >= 0, Tr W = 1}`` via the eigenvalue simplex."""
    w, V = np.linalg.eigh(hermitian_part(H))
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, w.size + 1)
    r = ind[u - css / ind > 0][-1]
    w = np.clip(w - css[r - 1] / r, 0.0, None)
    return (V * w) @ V.conj().T


def verify_witness(phi: LinearMap, W, tol: ToleranceConfig = DEFAULT_TOL):
    """Repair ``W`` into an exact unit-trace PPT operator and evaluate it.

    Adds ``delta I`` to absorb negative eigenvalues of ``W`` and ``PT(W)``
    (``PT(I) = I``) and renormalizes. Returns ``(W, value, ok)`` where ``ok``
    is the independent PSD check of both parts at ``eps_psd / 10``.
    """
    pt = _pt(phi)
    J = to_choi(phi)
    W = hermitian_part(np.asarray(W, dtype=complex))
    n = W.shape[0]
    delta = max(0.0, -min_eig(W), -min_eig(pt(W)))
    if delta > 0:
        W = W + 2 * delta * np.eye(n)
    W = W / np.trace(W).real
    ok = min_eig(W) >= -tol.eps_psd / 10 and min_eig(pt(W)) >= -tol.eps_psd / 10
    value = float(np.trace(J @ W).real)
    return W, value, ok


def ppt_witness_search(
    phi: LinearMap,
    tol: ToleranceConfig = DEFAULT_TOL,
    restarts: int = 3,
    max_iters: int = 5000,
    seed: int = 0,
    witness_tol: float = 1e-8,
):
    """Minimize ``Tr(J W)`` over unit-trace PPT ``W``.

    Splitting ``W`` into a copy constrained to unit-trace PSD and a copy
    constrained to PT-PSD, the alternating direction method takes a
    gradient step of size ``1/||J||`` on the first copy followed by exact
    projections on each side. The problem is convex, so extra restarts
    from random starts only matter when a run hits ``max_iters``. Every run
    ends with ``verify_witness``; a verified value below ``-witness_tol``
    gives ``WitnessFound``, else ``Inconclusive``.
    """
    J = hermitian_part(to_choi(phi))
    pt = _pt(phi)
    n = J.shape[0]
    L = float(np.linalg.norm(J, 2))
    if L == 0:
        return Inconclusive(iterations=0, best_residual=np.nan, best_witness_value=0.0)
    G = J / L
    rng = np.random.default_rng(seed)
    best = (np.inf, None)
    total = 0
    for r in range(max(1, restarts)):
        if r == 0:
            Y = np.eye(n, dtype=complex) / n
        else:
            R = random_complex((n, n), rng)
            Y = R @ R.conj().T
            Y = Y / np.trace(Y).real
        U = np.zeros((n, n), dtype=complex)
        X = Y
        converged = False
        for it in range(1, max_iters + 1):
            total += 1
            X = _proj_psd_unit_trace(Y - U - G)
            Y_new = pt(proj_psd(pt(X + U)))
            U = U + X - Y_new
            gap = max(np.abs(X - Y_new).max(), np.abs(Y_new - Y).max())
            Y = Y_new
            if gap < tol.opt_tol:
                converged = True
                break
        Wv, v, ok = verify_witness(phi, X, tol)
        if ok and v < best[0]:
            best = (v, Wv)
        if converged or best[0] < -witness_tol:
            break
    if best[1] is not None and best[0] < -witness_tol:
        return WitnessFound(W=best[1], value=best[0])
    return Inconclusive(iterations=total, best_residual=np.nan, best_witness_value=best[0])


def classify_decomposability(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0, **kw) -> dict:
    """Run both searches and report their verdicts side by side."""
    primal = decompose_search(phi, tol, kw.get("max_iters", 5000))
    dual = ppt_witness_search(phi, tol, seed=seed, max_iters=kw.get("witness_iters", 5000))
    if isinstance(primal, Decomposed):
        verdict = "decomposable"
    elif isinstance(dual, WitnessFound):
        verdict = "nondecomposable"
    else:
        verdict = "inconclusive"
    return {"verdict": verdict, "primal": primal, "dual": dual}
