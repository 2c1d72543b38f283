"""Faces of the positive-map cone.

``G(xi, x)`` holds the maps sending ``xi xi*`` to a nonnegative multiple of
``xx*``; ``F(eta, y)`` holds the maps with ``phi(eta eta*) y = 0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import NotUnit, ZeroMap
from .linalg import DEFAULT_TOL, ToleranceConfig, as_ket, hermitian_part, numerical_rank, random_unit, top_eigpair
from .mapcore import LinearMap, apply, choi_example, norm


@dataclass(frozen=True)
class G:
    xi: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class F:
    eta: np.ndarray
    y: np.ndarray


def _unit(v, tol: ToleranceConfig) -> np.ndarray:
    v = as_ket(v)
    if abs(np.linalg.norm(v) - 1.0) > max(tol.eps_eq, 1e-12):
        raise NotUnit(f"vector norm is {np.linalg.norm(v):.12g}, expected 1")
    return v


def in_G(phi: LinearMap, xi, x, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    xi, x = _unit(xi, tol), _unit(x, tol)
    Y = apply(phi, np.outer(xi, xi.conj()))
    a = complex(np.vdot(x, Y @ x))
    resid = np.linalg.norm(Y - a * np.outer(x, x.conj()))
    member = bool(resid <= tol.eps_eq * max(1.0, float(np.linalg.norm(Y))))
    if a.real < -tol.eps_psd:
        warnings.warn(f"<x, phi(xi xi*) x> = {a.real:.3e} < 0; the map is not positive", RuntimeWarning)
    return member, max(0.0, a.real)


def in_F(phi: LinearMap, eta, y, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    eta, y = _unit(eta, tol), _unit(y, tol)
    v = apply(phi, np.outer(eta, eta.conj())) @ y
    return bool(np.linalg.norm(v) <= tol.eps_eq * max(1.0, norm(phi)))


def in_face(phi: LinearMap, spec, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    if isinstance(spec, G):
        return in_G(phi, spec.xi, spec.x, tol)[0]
    return in_F(phi, spec.eta, spec.y, tol)


def _second_eig(phi: LinearMap, z: np.ndarray) -> tuple[float, np.ndarray]:
    """Second largest eigenvalue of ``phi(xi xi*) / |xi|^2`` and its gradient in ``(Re xi, Im xi)``."""
    k = phi.k
    xi = z[:k] + 1j * z[k:]
    n2 = float(np.vdot(xi, xi).real)
    w, V = np.linalg.eigh(hermitian_part(apply(phi, np.outer(xi, xi.conj()))))
    if w.size < 2:
        return 0.0, np.zeros_like(z)
    lam, v = float(w[-2]), V[:, -2]
    # d lam = 2 Re(d xi^T N conj(xi)) with N_ij = <v, phi(E_ij) v>
    N = np.einsum("a,ijab,b->ij", v.conj(), phi.blocks, v)
    g = N @ xi.conj()
    grad_lam = np.concatenate([2 * g.real, -2 * g.imag])
    grad_n2 = 2 * z
    return lam / n2, grad_lam / n2 - lam * grad_n2 / n2**2


@dataclass
class MembershipSearch:
    """Outcome of ``find_G_membership``.

    ``found`` is ``(xi, x, lam)`` or None; ``best_second`` is the smallest
    second eigenvalue reached, normalized by the map scale.
    """

    found: tuple | None
    best_second: float
    restarts: int
    stats: dict = field(default_factory=dict)


def find_G_membership(
    phi: LinearMap,
    tol: ToleranceConfig = DEFAULT_TOL,
    restarts: int = 200,
    seed: int = 0,
) -> MembershipSearch:
    """Search for a face ``G(xi, x)`` containing ``phi``.

    Minimizes the second largest eigenvalue of ``phi(xi xi*)`` over unit
    ``xi`` by L-BFGS, starting from the basis vectors and then random
    points. A hit is confirmed with ``in_G``. None is not a proof.
    """
    if norm(phi) == 0:
        raise ZeroMap("every face contains the zero map")
    k = phi.k
    scale = max(1.0, norm(phi))
    rng = np.random.default_rng(seed)
    starts = [np.eye(k, dtype=complex)[i] for i in range(k)]
    starts += [random_unit(k, rng) for _ in range(max(0, restarts - k))]
    best = (np.inf, None)
    for n, s in enumerate(starts, 1):
        z0 = np.concatenate([s.real, s.imag])
        val = _second_eig(phi, z0)[0]
        if val > tol.eps_eq * scale:
            res = minimize(
                lambda z: _second_eig(phi, z),
                z0,
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": 200, "ftol": 1e-15, "gtol": 1e-12},
            )
            z0 = res.x / np.linalg.norm(res.x)
            val = _second_eig(phi, z0)[0]
        if val < best[0]:
            best = (val, z0)
        if val <= tol.eps_eq * scale:
            xi = z0[:k] + 1j * z0[k:]
            xi = xi / np.linalg.norm(xi)
            lam, x = top_eigpair(apply(phi, np.outer(xi, xi.conj())))
            member, lam = in_G(phi, xi, x, tol)
            if member:
                return MembershipSearch((xi, x, lam), val / scale, n, {"starts_tried": n})
    return MembershipSearch(None, best[0] / scale, len(starts), {"starts_tried": len(starts)})


@dataclass
class ExceptionalProjection:
    P: np.ndarray
    image: np.ndarray
    rank: int


def choi_exceptional_projections(tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Four rank-one projections with a singular image under the Choi map.

    These are the basis projections and the all-1/3 matrix. The Choi map
    commutes with conjugation by diagonal unitaries, so the all-1/3 matrix
    stands for the whole family returned by ``choi_phase_projection``; up to
    that symmetry the list is complete.
    """
    phi = choi_example()
    Ps = [np.full((3, 3), 1.0 / 3.0, dtype=complex)]
    for i in range(3):
        E = np.zeros((3, 3), dtype=complex)
        E[i, i] = 1.0
        Ps.append(E)
    out = []
    for P in Ps:
        Y = apply(phi, P)
        out.append(ExceptionalProjection(P=P, image=Y, rank=numerical_rank(Y, tol)))
    return out


def choi_phase_projection(s: float, t: float) -> np.ndarray:
    """``xi xi*`` for ``xi = (1, e^{is}, e^{it}) / sqrt(3)``; the Choi map sends it to ``I - xi xi*``."""
    xi = np.array([1.0, np.exp(1j * s), np.exp(1j * t)]) / np.sqrt(3.0)
    return np.outer(xi, xi.conj())
