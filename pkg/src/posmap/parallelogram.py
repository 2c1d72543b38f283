"""Recovering a linear map from its quadratic restriction.

A function ``R`` from vectors to matrices that satisfies the parallelogram
identity ``R(a + b) + R(a - b) = 2R(a) + 2R(b)`` together with
``R(-a) = R(ia) = R(a)`` is ``eta -> phi(eta eta*)`` for a unique linear map
``phi``; ``reconstruct`` computes ``phi`` by polarization. In finite
dimension no continuity hypothesis is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, IdentityViolated
from .linalg import DEFAULT_TOL, ToleranceConfig, as_ket, as_matrix, min_eig, random_complex
from .mapcore import LinearMap, apply


@dataclass
class QuadraticFunction:
    """A callable ``eta -> R(eta)`` with declared dimensions.

    ``positive`` flags that every value should be PSD. ``finite`` marks an
    evaluator that only knows a table (see ``tabulated``); checks then use
    basis pairs only, which already determine the polarization.
    """

    k: int
    h: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    positive: bool = False
    finite: bool = False

    def __call__(self, eta) -> np.ndarray:
        eta = as_ket(eta)
        if eta.size != self.k:
            raise DimensionMismatch(f"expected a vector of length {self.k}, got {eta.size}")
        Y = as_matrix(self.evaluator(eta))
        if Y.shape != (self.h, self.h):
            raise DimensionMismatch(f"evaluator returned {Y.shape}, expected {(self.h, self.h)}")
        return Y


def from_map(phi: LinearMap, positive: bool = False) -> QuadraticFunction:
    return QuadraticFunction(phi.k, phi.h, lambda eta: apply(phi, np.outer(eta, eta.conj())), positive)


@dataclass
class ParallelogramReport:
    max_residual: float
    violation: tuple | None
    checked: int

    @property
    def ok(self) -> bool:
        return self.violation is None


def _pairs(k: int, samples: int, rng):
    I = np.eye(k, dtype=complex)
    for i, j in itertools.product(range(k), repeat=2):
        yield I[i], I[j]
        yield I[i], 1j * I[j]
    for _ in range(samples):
        yield random_complex(k, rng), random_complex(k, rng)


def _points(Rf: QuadraticFunction, n: int, rng) -> list:
    if Rf.finite:
        return required_vectors(Rf.k)
    return [random_complex(Rf.k, rng) for _ in range(n)]


def check_parallelogram(
    Rf: QuadraticFunction,
    samples: int = 100,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> ParallelogramReport:
    """Test the parallelogram identity and ``R(-a) = R(ia) = R(a)``.

    Residuals are relative to the largest term involved. The first pair
    whose residual exceeds ``eps_eq`` is reported as the violation.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    worst, violation, n = 0.0, None, 0
    for a, b in _pairs(Rf.k, 0 if Rf.finite else samples, rng):
        Ra, Rb, Rp, Rm = Rf(a), Rf(b), Rf(a + b), Rf(a - b)
        terms = [Rp, Rm, Ra, Rb]
        size = max(1.0, max(float(np.abs(T).max(initial=0.0)) for T in terms))
        checks = [
            ("parallelogram", np.abs(Rp + Rm - 2 * Ra - 2 * Rb).max() / size),
            ("negation", np.abs(Rf(-a) - Ra).max() / size),
            ("rotation", np.abs(Rf(1j * a) - Ra).max() / size),
        ]
        n += 1
        for name, res in checks:
            res = float(res)
            worst = max(worst, res)
            if res > tol.eps_eq and violation is None:
                violation = (name, a, b, res)
    return ParallelogramReport(max_residual=worst, violation=violation, checked=n)


def reconstruct(
    Rf: QuadraticFunction,
    tol: ToleranceConfig = DEFAULT_TOL,
    samples: int = 100,
    seed: int = 0,
) -> LinearMap:
    """Polarize ``R`` into the linear map ``phi`` with ``phi(eta eta*) = R(eta)``.

    Block ``(i, j)`` is ``phi(e_i e_j*)``, assembled from ``R`` at
    ``e_i +- e_j`` and ``i e_i +- e_j``. The identity check runs first and a
    failure raises ``IdentityViolated`` naming the pair.
    """
    rep = check_parallelogram(Rf, samples, tol, seed)
    if not rep.ok:
        name, a, b, res = rep.violation
        raise IdentityViolated(
            f"{name} identity fails at a={np.round(a, 6).tolist()}, b={np.round(b, 6).tolist()} (residual {res:.3e})",
            pair=(a, b),
            residual=res,
        )
    k, h = Rf.k, Rf.h
    I = np.eye(k, dtype=complex)
    blocks = np.zeros((k, k, h, h), dtype=complex)
    for i, j in itertools.product(range(k), repeat=2):
        a, b = I[i], I[j]
        # re = (phi(ab*) + phi(ba*))/2 and im = i(phi(ab*) - phi(ba*))/2
        re = 0.25 * (Rf(a + b) - Rf(a - b))
        im = 0.25 * (Rf(1j * a + b) - Rf(1j * a - b))
        blocks[i, j] = re - 1j * im
    phi = LinearMap(blocks, name="reconstructed")
    _verify(phi, Rf, tol, seed)
    return phi


def _verify(phi: LinearMap, Rf: QuadraticFunction, tol: ToleranceConfig, seed: int, n: int = 20) -> None:
    rng = np.random.default_rng(seed + 1)
    for eta in _points(Rf, n, rng):
        R = Rf(eta)
        got = apply(phi, np.outer(eta, eta.conj()))
        size = max(1.0, float(np.abs(R).max(initial=0.0)))
        if np.abs(got - R).max() > tol.eps_eq * size * 10:
            raise IdentityViolated("reconstructed map does not reproduce R", pair=(eta, eta))
        if Rf.positive and min_eig(got) < -tol.eps_psd * size:
            raise IdentityViolated("R is flagged positive but a reconstructed value is not PSD", pair=(eta, eta))


def required_vectors(k: int) -> list:
    """Vectors at which a tabulation must supply ``R``: ``e_i``, ``e_i +- e_j``, ``e_i +- i e_j``."""
    I = np.eye(k, dtype=complex)
    out = [I[i] for i in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        for c in (1, -1, 1j, -1j):
            out.append(I[i] + c * I[j])
    return out


def tabulated(k: int, h: int, entries, positive: bool = False) -> QuadraticFunction:
    """Quadratic function defined by a finite table of ``(vector, value)``.

    Lookups of ``c v`` for a tabulated ``v`` return ``|c|^2 R(v)``, so the
    table extends to every scalar multiple of a stored vector; the zero
    vector maps to zero. Other inputs raise ``KeyError``.
    """
    table = [(as_ket(v), as_matrix(Y)) for v, Y in entries]
    for v, Y in table:
        if v.size != k or Y.shape != (h, h):
            raise DimensionMismatch("tabulation entry has wrong dimensions")

    def ev(eta):
        if not np.any(eta):
            return np.zeros((h, h), dtype=complex)
        for v, Y in table:
            # eta = c v  iff  |<v, eta>| = |v| |eta|
            c = np.vdot(v, eta) / np.vdot(v, v).real
            if np.abs(eta - c * v).max() <= 1e-12 * max(1.0, np.abs(eta).max()):
                return abs(c) ** 2 * Y
        raise KeyError(f"no tabulated value for {eta.tolist()}")

    return QuadraticFunction(k, h, ev, positive, finite=True)
