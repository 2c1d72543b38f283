"""Positivity-class tests.

Block positivity and k-positivity are probed by a see-saw over vectors of
bounded Schmidt rank: ``phi`` is s-positive iff ``<w, J w> >= 0`` for every
``w = sum_{m<=s} conj(xi_m) (x) y_m``. Each half-step of the see-saw is an
exact Hermitian eigenproblem on a subspace that contains the current
iterate, so the objective never increases.

A negative ``best_value`` is a certificate of non-membership; a nonnegative
one is evidence only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadSchmidtRank, DimensionMismatch, EmptyGrid
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    hermitian_part,
    min_eig,
    partial_transpose_first,
    random_complex,
)
from .mapcore import LinearMap, apply, norm, to_choi

__all__ = [
    "OptReport",
    "SchwarzConfig",
    "SchwarzReport",
    "min_product_value",
    "min_schmidt_k_value",
    "schmidt_vector",
    "evaluate_witness",
    "is_completely_positive",
    "is_completely_copositive",
    "schwarz_defect",
    "schwarz_co_defect",
]


@dataclass
class OptReport:
    """Result of a see-saw minimization.

    ``witness`` is a list of ``(xi, y)`` pairs; the normalized vector
    ``w = sum conj(xi) (x) y`` attains ``best_value``.
    """

    best_value: float
    witness: list = field(default_factory=list)
    restarts_used: int = 0
    converged: bool = False
    sweeps: int = 0


def schmidt_vector(witness) -> np.ndarray:
    return sum(np.kron(np.conj(xi), y) for xi, y in witness)


def evaluate_witness(phi: LinearMap, witness) -> float:
    """Re-evaluate ``<w, J w> / <w, w>`` for a Schmidt-pair witness."""
    w = schmidt_vector(witness)
    J = to_choi(phi)
    return float(np.real(np.vdot(w, J @ w)) / np.real(np.vdot(w, w)))


def _min_eigvec(M: np.ndarray) -> tuple[float, np.ndarray]:
    w, V = np.linalg.eigh(hermitian_part(M))
    return float(w[0]), V[:, 0]


def _seesaw(J: np.ndarray, k: int, h: int, s: int, rng, tol: ToleranceConfig):
    """One see-saw run from a random start; returns (value, A, Y, converged, sweeps).

    Columns of ``A`` (k x s) and ``Y`` (h x s) give ``w = sum_m A[:,m] (x) Y[:,m]``.
    """
    J4 = J.reshape(k, h, k, h)
    A, _ = np.linalg.qr(random_complex((k, s), rng))
    value = np.inf
    converged = False
    sweeps = 0
    for sweeps in range(1, max(1, tol.max_iters) + 1):
        # y-step: restrict J to {sum_m a_m (x) y_m : y_m free}
        M = np.einsum("im,ibjc,jn->mbnc", A.conj(), J4, A).reshape(s * h, s * h)
        _, z = _min_eigvec(M)
        Y = z.reshape(s, h).T
        Q, R = np.linalg.qr(Y)
        # sum_m a_m (x) (Q R)_m = sum_n (A R^T)_n (x) q_n
        A = A @ R.T
        Y = Q
        # a-step: restrict J to {sum_n a_n (x) q_n : a_n free}
        M = np.einsum("bm,ibjc,cn->minj", Y.conj(), J4, Y).reshape(s * k, s * k)
        new_value, z = _min_eigvec(M)
        A = z.reshape(s, k).T
        Q, R = np.linalg.qr(A)
        A = Q
        Y = Y @ R.T
        if value - new_value < tol.opt_tol:
            value = min(value, new_value)
            converged = True
            break
        value = new_value
    return value, A, Y, converged, sweeps


def min_schmidt_k_value(
    phi: LinearMap,
    s: int,
    tol: ToleranceConfig = DEFAULT_TOL,
    restarts: int = 50,
    seed: int = 0,
) -> OptReport:
    """Minimize ``<w, J w>`` over unit vectors of Schmidt rank at most ``s``.

    Restarts are seeded from ``numpy.random.default_rng(seed)``; the lowest
    value wins, with earlier restarts preferred on ties.
    """
    k, h = phi.k, phi.h
    if not 1 <= s <= min(k, h):
        raise BadSchmidtRank(f"Schmidt rank must lie in [1, {min(k, h)}], got {s}")
    J = to_choi(phi)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        run = _seesaw(J, k, h, s, rng, tol)
        if best is None or run[0] < best[0]:
            best = run
    value, A, Y, converged, sweeps = best
    witness = [(np.conj(A[:, m]), Y[:, m]) for m in range(s)]
    # report the value the witness actually attains
    value = evaluate_witness(phi, witness)
    return OptReport(
        best_value=value,
        witness=witness,
        restarts_used=max(1, restarts),
        converged=converged,
        sweeps=sweeps,
    )


def min_product_value(
    phi: LinearMap,
    tol: ToleranceConfig = DEFAULT_TOL,
    restarts: int = 50,
    seed: int = 0,
) -> OptReport:
    """Minimum found of ``<y, phi(xi xi*) y>`` over unit ``xi``, ``y``.

    A negative value certifies that ``phi`` is not positive. The witness is a
    single pair ``(xi, y)`` of unit vectors.
    """
    if phi.k < 1 or phi.h < 1:
        raise DimensionMismatch("empty map")
    rep = min_schmidt_k_value(phi, 1, tol, restarts, seed)
    xi, y = rep.witness[0]
    xi, y = xi / np.linalg.norm(xi), y / np.linalg.norm(y)
    rep.witness = [(xi, y)]
    rep.best_value = product_value(phi, xi, y)
    return rep


def product_value(phi: LinearMap, xi, y) -> float:
    """``<y, phi(xi xi*) y>``."""
    return float(np.real(np.vdot(y, apply(phi, np.outer(xi, np.conj(xi))) @ y)))


def is_completely_positive(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    lo = min_eig(to_choi(phi))
    return lo >= -tol.eps_psd, lo


def is_completely_copositive(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    lo = min_eig(partial_transpose_first(to_choi(phi), phi.k, phi.h))
    return lo >= -tol.eps_psd, lo


@dataclass(frozen=True)
class SchwarzConfig:
    """Search grid for the constant in the Schwarz-type inequality."""

    gamma_grid: tuple = tuple(2.0**e for e in range(-8, 9))
    sample_count: int = 200

    def __post_init__(self):
        grid = tuple(float(g) for g in self.gamma_grid)
        if not grid:
            raise EmptyGrid("gamma_grid is empty")
        if any(not g > 0 for g in grid):
            raise EmptyGrid("gamma_grid entries must be positive")
        object.__setattr__(self, "gamma_grid", grid)


@dataclass
class SchwarzReport:
    """Outcome of a Schwarz-defect scan.

    ``worst`` lists ``(gamma, most negative eigenvalue)`` per grid point and
    ``witnesses`` the sample ``X`` attaining it. ``best_gamma`` is the largest
    grid value whose worst defect is within tolerance, or ``None``.
    """

    best_gamma: float | None
    worst: list
    witnesses: list


def _schwarz_samples(k: int, count: int, rng) -> list:
    samples = [np.eye(k, dtype=complex)]
    for i in range(k):
        for j in range(k):
            E = np.zeros((k, k), dtype=complex)
            E[i, j] = 1.0
            samples.append(E)
    for _ in range(count):
        X = random_complex((k, k), rng)
        samples.append(X / np.linalg.norm(X, 2))
    return samples


def _schwarz_scan(phi, cfg, tol, seed, co):
    rng = np.random.default_rng(seed)
    samples = _schwarz_samples(phi.k, cfg.sample_count, rng)
    first, second = [], []
    for X in samples:
        Xs = X.conj().T
        first.append(apply(phi, X @ Xs if co else Xs @ X))
        second.append(apply(phi, Xs) @ apply(phi, X))
    worst, witnesses = [], []
    best_gamma = None
    for g in cfg.gamma_grid:
        lo, arg = np.inf, None
        for X, F, S in zip(samples, first, second):
            val = min_eig(hermitian_part(g * F - g * g * S))
            if val < lo:
                lo, arg = val, X
        worst.append((g, lo))
        witnesses.append(arg)
        if lo >= -tol.eps_psd:
            best_gamma = g if best_gamma is None else max(best_gamma, g)
    return SchwarzReport(best_gamma=best_gamma, worst=worst, witnesses=witnesses)


def schwarz_defect(
    phi: LinearMap,
    cfg: SchwarzConfig = SchwarzConfig(),
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> SchwarzReport:
    """Scan ``gamma phi(X*X) - gamma^2 phi(X*) phi(X)`` over sampled ``X``.

    Samples are the identity, all matrix units and ``sample_count`` random
    matrices of operator norm one. A returned ``best_gamma`` is evidence of
    local complete positivity; ``None`` does not disprove it.
    """
    return _schwarz_scan(phi, cfg, tol, seed, co=False)


def schwarz_co_defect(
    phi: LinearMap,
    cfg: SchwarzConfig = SchwarzConfig(),
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> SchwarzReport:
    """Same scan with ``phi(X X*)`` in place of ``phi(X* X)``."""
    return _schwarz_scan(phi, cfg, tol, seed, co=True)


def map_scale(phi: LinearMap) -> float:
    return max(1.0, norm(phi))
