"""Block decomposition of an operator relative to a unit vector.

For a unit vector ``x`` every ``Y`` splits uniquely as
``Y = alpha xx* + u x* + x v* + Z`` with ``u, v`` orthogonal to ``x`` and
``Z`` supported on the orthocomplement ``H_x``. Vectors and operators on
``H_x`` are stored in coordinates of a fixed orthonormal basis of ``H_x``
obtained by Householder completion of ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotInFace, NotUnit
from .linalg import DEFAULT_TOL, ToleranceConfig, as_ket, as_matrix, min_eig, random_complex, random_unit
from .mapcore import LinearMap, apply


def complement_basis(x) -> np.ndarray:
    """Orthonormal basis of the orthocomplement of unit ``x`` as columns.

    Uses the Householder reflector sending ``x`` to a multiple of ``e_1``;
    its remaining columns span ``x``'s orthocomplement. Deterministic in ``x``.
    """
    x = as_ket(x)
    n = x.size
    phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
    w = x.copy()
    w[0] += phase
    H = np.eye(n, dtype=complex) - 2.0 * np.outer(w, w.conj()) / np.vdot(w, w).real
    return H[:, 1:]


def _check_unit(x, tol: ToleranceConfig) -> np.ndarray:
    x = as_ket(x)
    if abs(np.linalg.norm(x) - 1.0) > max(tol.eps_eq, 1e-12):
        raise NotUnit(f"vector norm is {np.linalg.norm(x):.12g}, expected 1")
    return x


@dataclass
class BlockForm:
    """Coordinates ``(alpha, u, v, Z)`` of an operator relative to ``x``.

    ``u``, ``v`` and ``Z`` are expressed in the columns of ``basis``.
    """

    alpha: complex
    u: np.ndarray
    v: np.ndarray
    Z: np.ndarray
    basis: np.ndarray = field(repr=False)


def decompose_at(Y, x, tol: ToleranceConfig = DEFAULT_TOL) -> BlockForm:
    Y = as_matrix(Y, square=True)
    x = _check_unit(x, tol)
    if Y.shape[0] != x.size:
        raise DimensionMismatch(f"operator is {Y.shape}, vector has length {x.size}")
    W = complement_basis(x)
    Wh = W.conj().T
    return BlockForm(
        alpha=complex(np.vdot(x, Y @ x)),
        u=Wh @ (Y @ x),
        v=Wh @ (Y.conj().T @ x),
        Z=Wh @ Y @ W,
        basis=W,
    )


def recompose(f: BlockForm, x) -> np.ndarray:
    x = as_ket(x)
    W = f.basis
    if W.shape[0] != x.size or W.shape[1] != np.size(f.u):
        raise DimensionMismatch("block form does not match the vector's dimension")
    u, v = W @ f.u, W @ f.v
    return f.alpha * np.outer(x, x.conj()) + np.outer(u, x.conj()) + np.outer(x, v.conj()) + W @ f.Z @ W.conj().T


def psd_via_form(f: BlockForm, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Positivity of ``Y`` decided from its block form.

    Requires real ``alpha >= 0``, ``Z >= 0``, ``u = v`` and ``uu* <= alpha Z``.
    When ``alpha`` is numerically zero the last condition forces ``u = 0``.
    """
    a = f.alpha
    if abs(a.imag) > tol.eps_eq or a.real < -tol.eps_psd:
        return False
    if np.linalg.norm(f.u - f.v) > tol.eps_eq:
        return False
    Z = 0.5 * (f.Z + f.Z.conj().T)
    if np.abs(f.Z - Z).max(initial=0.0) > tol.eps_eq:
        return False
    if Z.size and min_eig(Z) < -tol.eps_psd:
        return False
    if a.real <= tol.eps_psd:
        return bool(np.linalg.norm(f.u) <= tol.eps_eq)
    if Z.size == 0:
        return True
    return min_eig(a.real * Z - np.outer(f.u, f.u.conj())) >= -tol.eps_psd


@dataclass
class ComponentForm:
    """Components of ``phi(eta xi*)`` and ``phi(eta eta*)`` for ``phi`` in a face G.

    ``phi(eta xi*) = beta xx* + u x* + x v*`` and
    ``phi(eta eta*) = mu xx* + r x* + x r* + Rop``; vectors and ``Rop`` are in
    coordinates of ``basis``.
    """

    beta: complex
    u: np.ndarray
    v: np.ndarray
    mu: float
    r: np.ndarray
    Rop: np.ndarray
    basis: np.ndarray = field(repr=False, default=None)


def extract_components(phi: LinearMap, xi, x, eta, tol: ToleranceConfig = DEFAULT_TOL) -> ComponentForm:
    """Read off ``(beta, u, v, mu, r, R)`` for ``phi`` in the face ``G_{xi,x}``.

    Raises ``NotInFace`` if the compressed part of ``phi(eta xi*)`` to the
    orthocomplement of ``x`` does not vanish.
    """
    xi, eta = as_ket(xi), as_ket(eta)
    x = _check_unit(x, tol)
    A = apply(phi, np.outer(eta, xi.conj()))
    fa = decompose_at(A, x, tol)
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if fa.Z.size and np.abs(fa.Z).max() > tol.eps_eq * scale:
        raise NotInFace(f"compressed part of phi(eta xi*) has size {np.abs(fa.Z).max():.3e}")
    fe = decompose_at(apply(phi, np.outer(eta, eta.conj())), x, tol)
    return ComponentForm(
        beta=fa.alpha,
        u=fa.u,
        v=fa.v,
        mu=float(fe.alpha.real),
        r=fe.u,
        Rop=0.5 * (fe.Z + fe.Z.conj().T),
        basis=fa.basis,
    )


@dataclass(frozen=True)
class ProbeFunctional:
    """``rho = sigma xx* + x s* + s x* + S`` with ``ss* <= sigma S``."""

    sigma: float
    s: np.ndarray
    S: np.ndarray


def random_probe(dim: int, rng: np.random.Generator) -> ProbeFunctional:
    sigma = float(rng.uniform(0.1, 2.0))
    s = random_complex(dim, rng)
    G = random_complex((dim, dim), rng) / np.sqrt(2 * dim)
    S = np.outer(s, s.conj()) / sigma + G @ G.conj().T
    return ProbeFunctional(sigma=sigma, s=s, S=S)


@dataclass
class Violation:
    inequality: str
    lhs: float
    rhs: float
    witness: object = None


@dataclass
class InequalityReport:
    violations: list
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def _exceeds(lhs: float, rhs: float, tol: ToleranceConfig) -> bool:
    return lhs - rhs > tol.eps_psd * max(1.0, abs(lhs), abs(rhs))


def check_component_inequalities(
    c: ComponentForm,
    lam: float,
    tol: ToleranceConfig = DEFAULT_TOL,
    probes=None,
    directions=None,
    seed: int = 0,
    n_random: int = 200,
) -> InequalityReport:
    """Evaluate the scalar, probe and directional inequalities on ``c``.

    When ``probes`` or ``directions`` is ``None``, ``n_random`` random ones
    are drawn (probes with ``S = ss*/sigma + PSD``, unit directions).
    """
    dim = np.size(c.u)
    rng = np.random.default_rng(seed)
    if probes is None:
        probes = [random_probe(dim, rng) for _ in range(n_random)] if dim else []
    if directions is None:
        directions = [random_unit(dim, rng) for _ in range(n_random)] if dim else []
    beta, mu, u, v, r, R = c.beta, c.mu, c.u, c.v, c.r, c.Rop
    violations = []
    checked = 1
    lhs, rhs = abs(beta) ** 2, lam * mu
    if _exceeds(lhs, rhs, tol):
        violations.append(Violation("beta", lhs, rhs))
    for p in probes:
        checked += 1
        lhs = abs(p.sigma * beta + np.vdot(p.s, u) + np.vdot(v, p.s)) ** 2
        rhs = p.sigma * lam * (p.sigma * mu + 2 * np.vdot(p.s, r).real + np.trace(p.S @ R).real)
        if _exceeds(lhs, rhs, tol):
            violations.append(Violation("probe", float(lhs), float(rhs), p))
    gap_beta = lam * mu - abs(beta) ** 2
    for y in directions:
        checked += 2
        t = np.vdot(y, u) + np.vdot(v, y)
        yRy = np.vdot(y, R @ y).real
        lhs, rhs = abs(t) ** 2, lam * yRy
        if _exceeds(lhs, rhs, tol):
            violations.append(Violation("R", float(lhs), float(rhs), y))
        lhs = np.vdot(y, lam * r - np.conj(beta) * u - beta * v).real ** 2
        rhs = gap_beta * (lam * yRy - abs(t) ** 2)
        if _exceeds(lhs, rhs, tol):
            violations.append(Violation("re", float(lhs), float(rhs), y))
    return InequalityReport(violations=violations, checked=checked)


def _wu_form(c: ComponentForm, lam: float, w_vec: np.ndarray, side: np.ndarray) -> BlockForm:
    """Block form of ``lam phi(eta eta*) - (beta x + side)(beta x + side)*``."""
    d = np.size(side)
    return BlockForm(
        alpha=complex(lam * c.mu - abs(c.beta) ** 2),
        u=w_vec,
        v=w_vec,
        Z=lam * c.Rop - np.outer(side, side.conj()),
        basis=c.basis if c.basis is not None else np.zeros((d + 1, d)),
    )


def check_wu(c: ComponentForm, lam: float, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, bool]:
    """Decide the two Cauchy-Schwarz-type matrix inequalities via block forms.

    ``psil_holds`` checks ``(beta x + u)(beta x + u)* <= lam phi(eta eta*)``
    written as a block form with off-diagonal part ``lam r - conj(beta) u``;
    ``chil_holds`` is the same with ``v`` and ``beta``. Both are decided by
    ``psd_via_form`` so the diagonal conditions ``lam mu >= |beta|^2`` and
    ``lam R >= uu*`` are enforced alongside the off-diagonal one.
    """
    psil = psd_via_form(_wu_form(c, lam, lam * c.r - np.conj(c.beta) * c.u, c.u), tol)
    chil = psd_via_form(_wu_form(c, lam, lam * c.r - c.beta * c.v, c.v), tol)
    return psil, chil
