"""Linear maps B(C^k) -> B(C^h) stored by their Choi blocks.

A map ``phi`` is held as the k x k grid of h x h blocks ``phi(E_ij)``. The
Choi matrix uses the convention ``J = sum_ij E_ij (x) phi(E_ij)`` so the
first tensor factor carries the input index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotProjection, NotPSD
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    is_psd,
    numerical_rank,
    random_complex,
)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map between matrix algebras given by its Choi blocks.

    ``blocks`` has shape ``(k, k, h, h)`` with ``blocks[i, j] = phi(E_ij)``.
    """

    blocks: np.ndarray
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        b = np.array(self.blocks, dtype=complex)
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2] != b.shape[3]:
            raise DimensionMismatch(f"blocks must have shape (k, k, h, h), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    @property
    def dim_in(self) -> int:
        return self.blocks.shape[0]

    @property
    def dim_out(self) -> int:
        return self.blocks.shape[2]

    @property
    def k(self) -> int:
        return self.dim_in

    @property
    def h(self) -> int:
        return self.dim_out

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i, j]

    def __call__(self, X) -> np.ndarray:
        return apply(self, X)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return scale_add(1.0, self, 1.0, other)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return scale_add(1.0, self, -1.0, other)

    def __mul__(self, a: float) -> "LinearMap":
        return LinearMap(a * self.blocks)

    __rmul__ = __mul__

    def is_hermiticity_preserving(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        b = self.blocks
        adj = b.transpose(1, 0, 3, 2).conj()
        return bool(np.abs(b - adj).max(initial=0.0) <= tol.eps_eq * max(1.0, norm(self)))

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"<LinearMap{tag} k={self.k} h={self.h}>"


def norm(phi: LinearMap) -> float:
    """Frobenius norm of the Choi matrix."""
    return float(np.linalg.norm(phi.blocks.ravel()))


def allclose(phi: LinearMap, rho: LinearMap, atol: float) -> bool:
    if phi.blocks.shape != rho.blocks.shape:
        return False
    return bool(np.abs(phi.blocks - rho.blocks).max(initial=0.0) <= atol)


def apply(phi: LinearMap, X) -> np.ndarray:
    """Evaluate ``phi(X) = sum_ij X_ij phi(E_ij)``."""
    X = as_matrix(X)
    if X.shape != (phi.k, phi.k):
        raise DimensionMismatch(f"input must be {phi.k}x{phi.k}, got {X.shape}")
    return np.einsum("ij,ijab->ab", X, phi.blocks)


def to_choi(phi: LinearMap) -> np.ndarray:
    k, h = phi.k, phi.h
    return phi.blocks.transpose(0, 2, 1, 3).reshape(k * h, k * h).copy()


def from_choi(J, k: int, h: int, name: str | None = None) -> LinearMap:
    J = as_matrix(J)
    if J.shape != (k * h, k * h):
        raise DimensionMismatch(f"Choi matrix must be {(k * h, k * h)}, got {J.shape}")
    return LinearMap(J.reshape(k, h, k, h).transpose(0, 2, 1, 3), name=name)


def _units(k: int) -> np.ndarray:
    """All matrix units E_ij as an array of shape (k, k, k, k)."""
    E = np.zeros((k, k, k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            E[i, j, i, j] = 1.0
    return E


def from_kraus(B, name: str | None = None) -> LinearMap:
    """The map ``X -> B X B*`` for an h x k operator ``B``."""
    B = as_matrix(B)
    # B E_ij B* = (B e_i)(B e_j)*
    blocks = np.einsum("ai,bj->ijab", B, B.conj())
    return LinearMap(blocks, name=name)


def from_kraus_list(ops, name: str | None = None) -> LinearMap:
    ops = [as_matrix(B) for B in ops]
    blocks = sum(np.einsum("ai,bj->ijab", B, B.conj()) for B in ops)
    return LinearMap(blocks, name=name)


def from_cokraus(C, name: str | None = None) -> LinearMap:
    """The map ``X -> C X^T C*`` for an h x k operator ``C``."""
    C = as_matrix(C)
    # C E_ji C* = (C e_j)(C e_i)*
    blocks = np.einsum("aj,bi->ijab", C, C.conj())
    return LinearMap(blocks, name=name)


def from_functional(M, Q, tol: ToleranceConfig = DEFAULT_TOL, name: str | None = None) -> LinearMap:
    """The map ``X -> Tr(M X) Q`` with ``M`` PSD and ``Q`` a rank-one projection."""
    M = as_matrix(M, square=True)
    Q = as_matrix(Q, square=True)
    ok, lo = is_psd(M, tol)
    if not ok:
        raise NotPSD(f"functional matrix has eigenvalue {lo:.3e}")
    scale = max(1.0, float(np.abs(Q).max()))
    if (
        np.abs(Q - Q.conj().T).max() > tol.eps_eq * scale
        or np.abs(Q @ Q - Q).max() > tol.eps_eq * scale
        or numerical_rank(Q, tol) != 1
    ):
        raise NotProjection("Q must be a rank-one orthogonal projection")
    # Tr(M E_ij) = M_ji
    blocks = np.einsum("ji,ab->ijab", M, Q)
    return LinearMap(blocks, name=name)


def choi_example() -> LinearMap:
    """Choi's nondecomposable positive map on 3 x 3 matrices.

    The diagonal of the output is ``(a11 + a33, a22 + a11, a33 + a22)`` and
    every off-diagonal entry is ``-a_ij``.
    """
    b = np.zeros((3, 3, 3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            if i != j:
                b[i, j, i, j] = -1.0
    # E_ii feeds output diagonal entries i and i+1 (cyclically)
    for i in range(3):
        b[i, i, i, i] = 1.0
        b[i, i, (i + 1) % 3, (i + 1) % 3] = 1.0
    return LinearMap(b, name="choi")


def identity_map(k: int) -> LinearMap:
    return LinearMap(_units(k), name="identity")


def transpose_map(k: int) -> LinearMap:
    return LinearMap(_units(k).transpose(0, 1, 3, 2), name="transpose")


def zero_map(k: int, h: int | None = None) -> LinearMap:
    h = k if h is None else h
    return LinearMap(np.zeros((k, k, h, h), dtype=complex), name="zero")


def trace_map(k: int, h: int | None = None) -> LinearMap:
    """``X -> Tr(X) I_h``."""
    h = k if h is None else h
    return LinearMap(np.einsum("ij,ab->ijab", np.eye(k), np.eye(h)), name="trace")


def compose_transpose(phi: LinearMap) -> LinearMap:
    """``X -> phi(X^T)``; swaps the roles of k-positivity and k-copositivity."""
    return LinearMap(phi.blocks.transpose(1, 0, 2, 3))


def scale_add(a: float, phi: LinearMap, b: float, rho: LinearMap) -> LinearMap:
    if phi.blocks.shape != rho.blocks.shape:
        raise DimensionMismatch(
            f"maps differ in shape: {phi.blocks.shape} vs {rho.blocks.shape}"
        )
    return LinearMap(a * phi.blocks + b * rho.blocks)


def random_kraus_op(k: int, h: int, rng: np.random.Generator) -> np.ndarray:
    return random_complex((h, k), rng) / np.sqrt(2 * k)


def random_hp_map(k: int, h: int, rng: np.random.Generator) -> LinearMap:
    """A random Hermiticity-preserving (not necessarily positive) map."""
    G = random_complex((k * h, k * h), rng)
    return from_choi(0.5 * (G + G.conj().T) / np.sqrt(k * h), k, h)


def random_decomposable(k: int, h: int, rng: np.random.Generator, n_kraus: int = 1, n_cokraus: int = 1) -> LinearMap:
    blocks = np.zeros((k, k, h, h), dtype=complex)
    for _ in range(n_kraus):
        blocks = blocks + from_kraus(random_kraus_op(k, h, rng)).blocks
    for _ in range(n_cokraus):
        blocks = blocks + from_cokraus(random_kraus_op(k, h, rng)).blocks
    return LinearMap(blocks)
