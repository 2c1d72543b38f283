"""Rank-one nonincreasing maps.

A positive map with ``rank phi(P) <= 1`` for every rank-one projection ``P``
is a single Kraus map, a single co-Kraus map, or ``X -> omega(X) Q`` for a
positive functional ``omega`` and a rank-one projection ``Q``. This module
scans rank profiles, classifies maps into those forms and recovers the data.
A scalar helper decides the companion problem for the family
``R(lam) = xx* + |lam|^2 yy* + lam A + conj(lam) A*``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import minorant
from .errors import DimensionMismatch, InvalidSeed, ZeroMap
from .linalg import DEFAULT_TOL, ToleranceConfig, as_ket, as_matrix, numerical_rank, random_unit, top_eigpair
from .mapcore import LinearMap, apply, from_cokraus, from_functional, from_kraus, norm

# --- companion lemma -----------------------------------------------------


@dataclass(frozen=True)
class IndepXY:
    mu: complex
    orientation: str  # "xy_star" or "yx_star"


@dataclass(frozen=True)
class DepX:
    mu: complex


@dataclass(frozen=True)
class DepY:
    mu: complex


@dataclass(frozen=True)
class BothZero:
    projection_scale: complex
    direction: np.ndarray | None = field(default=None, compare=False)


@dataclass(frozen=True)
class NoCase:
    witness_lambda: complex
    rank: int


RADII = (0.25, 0.5, 1.0, 2.0, 4.0)
ANGLES = 32


def _R(x, y, A, lam):
    return np.outer(x, x.conj()) + abs(lam) ** 2 * np.outer(y, y.conj()) + lam * A + np.conj(lam) * A.conj().T


def lemma_rank_scan(x, y, A, lam_samples: int = 64, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0):
    """Largest numerical rank of ``R(lam)`` over a grid and random ``lam``.

    Returns ``(all_rank_le_1, (lam, rank))`` with the worst ``lam`` seen. The
    rank cutoff is relative to the size of the summands so that cancellation
    leftovers do not count.
    """
    x, y = as_ket(x), as_ket(y)
    A = as_matrix(A, square=True)
    if not (A.shape[0] == x.size == y.size):
        raise DimensionMismatch(f"A is {A.shape}, x has {x.size}, y has {y.size}")
    lams = [r * np.exp(2j * np.pi * t / ANGLES) for r in RADII for t in range(ANGLES)]
    rng = np.random.default_rng(seed)
    for _ in range(lam_samples):
        lams.append(np.exp(rng.normal()) * np.exp(2j * np.pi * rng.uniform()))
    nx2, ny2, nA = np.vdot(x, x).real, np.vdot(y, y).real, np.linalg.norm(A, 2)
    worst = (lams[0], -1)
    for lam in lams:
        scale = nx2 + abs(lam) ** 2 * ny2 + 2 * abs(lam) * nA
        r = numerical_rank(_R(x, y, A, lam), tol, scale=scale)
        if r > worst[1]:
            worst = (complex(lam), r)
    return worst[1] <= 1, worst


def _fit(A, T):
    """Least-squares ``mu`` with ``A ~ mu T`` and the residual norm."""
    t = T.ravel()
    tt = np.vdot(t, t).real
    if tt == 0:
        return 0j, float(np.linalg.norm(A))
    mu = np.vdot(t, A.ravel()) / tt
    return complex(mu), float(np.linalg.norm(A - mu * T))


def lemma_classify(x, y, A, tol: ToleranceConfig = DEFAULT_TOL, lam_samples: int = 64, seed: int = 0):
    """Match ``A`` to the admissible form for ``(x, y)``.

    Independent ``x, y``: ``A = mu xy*`` or ``mu yx*`` with ``|mu| = 1``.
    ``x != 0`` and ``y`` dependent on it: ``A = mu xx*``. ``x = 0 != y``:
    ``A = mu yy*``. ``x = y = 0``: ``A`` a multiple of a rank-one projection.
    Anything else gives ``NoCase`` with the worst ``lam`` of the scan.
    """
    x, y = as_ket(x), as_ket(y)
    A = as_matrix(A, square=True)
    nA = float(np.linalg.norm(A))
    thr = tol.eps_eq * max(nA, 1e-300)
    scale = max(np.linalg.norm(x), np.linalg.norm(y))
    zero_cut = 1e-12

    def nocase():
        _, (lam, r) = lemma_rank_scan(x, y, A, lam_samples, tol, seed)
        return NoCase(lam, r)

    if scale <= zero_cut:
        if nA == 0:
            return BothZero(0j)
        U, s, Vh = np.linalg.svd(A)
        u, v = U[:, 0], Vh[0].conj()
        # A = s0 u v*; a multiple of a projection needs v parallel to u
        ph = np.vdot(u, v)
        if abs(abs(ph) - 1) <= tol.eps_eq and np.linalg.norm(A - s[0] * np.conj(ph) * np.outer(u, u.conj())) <= thr:
            return BothZero(complex(s[0] * np.conj(ph)), u)
        return nocase()
    indep = numerical_rank(np.column_stack([x, y]), tol) == 2
    if indep:
        for orient, T in (("xy_star", np.outer(x, y.conj())), ("yx_star", np.outer(y, x.conj()))):
            mu, res = _fit(A, T)
            if res <= thr and abs(abs(mu) - 1) <= max(tol.eps_eq, 1e-9):
                return IndepXY(mu, orient)
        return nocase()
    if np.linalg.norm(x) > zero_cut:
        mu, res = _fit(A, np.outer(x, x.conj()))
        if res <= thr:
            return DepX(mu)
        return nocase()
    mu, res = _fit(A, np.outer(y, y.conj()))
    if res <= thr:
        return DepY(mu)
    return nocase()


# --- rank profile --------------------------------------------------------


@dataclass
class RankProfile:
    """Ranks of ``phi(xi xi*)`` over structured and random unit ``xi``.

    ``first_excess`` is the first probe (in scan order) whose rank exceeds
    one, with that rank; ``witness`` attains ``max_rank``.
    """

    max_rank: int
    witness: np.ndarray
    per_basis: list
    first_excess: tuple | None = None


def _probes(k: int, samples: int, rng):
    I = np.eye(k, dtype=complex)
    for i in range(k):
        yield I[i]
    for i, j in itertools.combinations(range(k), 2):
        for c in (1, -1, 1j, -1j):
            yield (I[i] + c * I[j]) / np.sqrt(2)
    for _ in range(samples):
        yield random_unit(k, rng)


def rank_profile(phi: LinearMap, samples: int = 100, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> RankProfile:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    best = (-1, None)
    per_basis = []
    first = None
    for n, xi in enumerate(_probes(phi.k, samples, rng)):
        r = numerical_rank(apply(phi, np.outer(xi, xi.conj())), tol)
        if n < phi.k:
            per_basis.append(r)
        if r > 1 and first is None:
            first = (xi, r)
        if r > best[0]:
            best = (r, xi)
    return RankProfile(max_rank=best[0], witness=best[1], per_basis=per_basis, first_excess=first)


# --- classifier ----------------------------------------------------------


@dataclass(frozen=True)
class Functional:
    M: np.ndarray
    Q: np.ndarray


@dataclass(frozen=True)
class Kraus:
    B: np.ndarray


@dataclass(frozen=True)
class CoKraus:
    C: np.ndarray


@dataclass(frozen=True)
class NotRankOne:
    witness: np.ndarray  # the projection P
    observed_rank: int
    residuals: dict = field(default_factory=dict, compare=False)


def phase_aligned_error(A, B) -> float:
    """``min_t ||e^{it} A - B||`` entrywise max."""
    A, B = as_matrix(A), as_matrix(B)
    c = np.vdot(A.ravel(), B.ravel())
    ph = c / abs(c) if abs(c) > 0 else 1.0
    return float(np.abs(ph * A - B).max(initial=0.0))


def rebuild(cls) -> LinearMap:
    if isinstance(cls, Kraus):
        return from_kraus(cls.B)
    if isinstance(cls, CoKraus):
        return from_cokraus(cls.C)
    if isinstance(cls, Functional):
        return LinearMap(np.einsum("ji,ab->ijab", cls.M, cls.Q))
    raise TypeError("NotRankOne has no map to rebuild")


def _block_residual(phi: LinearMap, rho: LinearMap) -> float:
    return float(np.abs(phi.blocks - rho.blocks).max(initial=0.0))


def classify_rank1(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL, samples: int = 100, seed: int = 0):
    """Classify ``phi`` as Kraus, co-Kraus, functional-times-projection or not rank-one.

    Branches are tried in that order, so maps that are both (pure
    functionals) come back as ``Kraus``. The zero map is ``Kraus(0)``.
    """
    nphi = norm(phi)
    if nphi == 0:
        return Kraus(np.zeros((phi.h, phi.k), dtype=complex))
    prof = rank_profile(phi, samples, tol, seed)
    if prof.first_excess is not None:
        xi, r = prof.first_excess
        return NotRankOne(np.outer(xi, xi.conj()), r)
    thr = tol.eps_eq * max(1.0, nphi)
    residuals = {}
    try:
        s = minorant.find_seed(phi, tol, seed)
    except (ZeroMap, InvalidSeed):
        s = None
    if s is not None:
        B = minorant.build_B(phi, s, tol)
        residuals["kraus"] = _block_residual(phi, from_kraus(B))
        if residuals["kraus"] <= thr:
            return Kraus(B)
        C = minorant.build_C(phi, s, tol)
        residuals["cokraus"] = _block_residual(phi, from_cokraus(C))
        if residuals["cokraus"] <= thr:
            return CoKraus(C)
    total = np.einsum("iiab->ab", phi.blocks)
    _, q = top_eigpair(total)
    Q = np.outer(q, q.conj())
    # phi(E_ij) = M_ji Q so M_ji = Tr(Q phi(E_ij))
    M = np.einsum("ab,ijba->ji", Q, phi.blocks)
    M = 0.5 * (M + M.conj().T)
    cand = Functional(M, Q)
    residuals["functional"] = _block_residual(phi, rebuild(cand))
    if residuals["functional"] <= thr:
        try:
            from_functional(M, Q, tol)
            return cand
        except ValueError:
            pass
    xi = prof.witness
    return NotRankOne(np.outer(xi, xi.conj()), prof.max_rank, residuals)
