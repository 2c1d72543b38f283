"""Dense complex linear algebra kernels.

Matrices are plain 2-d ``numpy`` arrays of dtype ``complex128`` and kets are
1-d arrays. The involution on C^n is fixed to entrywise conjugation in the
standard basis, so the transpose of an operator is the ordinary matrix
transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, NonSquare


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances shared by all analyses.

    Attributes:
        eps_psd: eigenvalue cutoff; a Hermitian matrix is PSD when its
            smallest eigenvalue is ``>= -eps_psd``.
        eps_rank: relative singular value cutoff used by ``numerical_rank``.
        eps_eq: entrywise (or normwise, relative) equality tolerance.
        opt_tol: stopping threshold for the iterative optimizers.
        max_iters: iteration cap for the iterative optimizers.
    """

    eps_psd: float = 1e-8
    eps_rank: float = 1e-8
    eps_eq: float = 1e-8
    opt_tol: float = 1e-10
    max_iters: int = 500

    def __post_init__(self):
        for name in ("eps_psd", "eps_rank", "eps_eq"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative")
        if not self.opt_tol > 0:
            raise ValueError("opt_tol must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")

    def as_dict(self) -> dict:
        return {
            "eps_psd": self.eps_psd,
            "eps_rank": self.eps_rank,
            "eps_eq": self.eps_eq,
            "opt_tol": self.opt_tol,
            "max_iters": self.max_iters,
        }


DEFAULT_TOL = ToleranceConfig()


def as_matrix(M, square: bool = False) -> np.ndarray:
    """Coerce to a finite complex 2-d array, optionally requiring squareness."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has NaN or Inf entries")
    return A


def as_ket(v) -> np.ndarray:
    x = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise NonFinite("vector has NaN or Inf entries")
    return x


def hermitian_part(H: np.ndarray) -> np.ndarray:
    return 0.5 * (H + H.conj().T)


def eig_hermitian(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as ``(H + H*)/2`` before solving, so small
    non-Hermitian noise is discarded.

    Returns:
        ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
        eigenvectors as orthonormal columns.
    """
    A = as_matrix(H, square=True)
    return np.linalg.eigh(hermitian_part(A))


def eigvals_hermitian(H) -> np.ndarray:
    A = as_matrix(H, square=True)
    return np.linalg.eigvalsh(hermitian_part(A))


def min_eig(H) -> float:
    A = as_matrix(H, square=True)
    if A.size == 0:
        return 0.0
    return float(eigvals_hermitian(A)[0])


def is_psd(H, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[bool, float]:
    """Return ``(flag, min_eig)`` where flag is ``min_eig >= -eps_psd``."""
    lo = min_eig(H)
    return lo >= -tol.eps_psd, lo


def numerical_rank(M, tol: ToleranceConfig = DEFAULT_TOL, scale: float | None = None) -> int:
    """Count singular values above ``eps_rank`` times a reference scale.

    The reference scale defaults to the largest singular value. Callers that
    form ``M`` as a sum of larger terms may pass the magnitude of those terms
    as ``scale`` so that cancellation noise is not counted as rank.
    """
    A = as_matrix(M)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    ref = s[0] if scale is None else max(float(scale), s[0])
    if ref <= 0.0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.eps_rank * ref))


def outer(xi, eta) -> np.ndarray:
    """The rank-one operator ``xi eta*``: entry (a, b) is ``xi_a conj(eta_b)``."""
    return np.outer(as_ket(xi), as_ket(eta).conj())


def transpose_inv(X) -> np.ndarray:
    """Transpose with respect to the standard-basis conjugation."""
    return as_matrix(X, square=True).T.copy()


def partial_transpose_first(J, k: int, h: int) -> np.ndarray:
    """Swap blocks (i, j) and (j, i) of a k x k grid of h x h blocks."""
    A = as_matrix(J)
    if A.shape != (k * h, k * h):
        raise DimensionMismatch(f"expected shape {(k * h, k * h)}, got {A.shape}")
    return A.reshape(k, h, k, h).transpose(2, 1, 0, 3).reshape(k * h, k * h)


def unit(v) -> np.ndarray:
    x = as_ket(v)
    n = np.linalg.norm(x)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return x / n


def fix_phase(v: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible entry is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    if mags.size == 0 or mags.max() == 0:
        return v
    idx = int(np.argmax(mags > cutoff * mags.max()))
    return v * (abs(v[idx]) / v[idx])


def top_eigpair(Y, rel_gap: float = 1e-9) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of a Hermitian matrix and a canonical eigenvector.

    When the top eigenvalue is degenerate, the eigenvector is the normalized
    projection onto the top eigenspace of the lowest-index standard basis
    vector with a non-negligible projection. The phase is fixed by
    ``fix_phase``.
    """
    w, V = eig_hermitian(Y)
    top = w[-1]
    spread = max(1.0, abs(w).max()) * rel_gap
    cols = V[:, w >= top - spread]
    if cols.shape[1] == 1:
        return float(top), fix_phase(cols[:, 0])
    P = cols @ cols.conj().T
    for i in range(P.shape[0]):
        if P[i, i].real > 1e-6:
            x = P[:, i] / np.sqrt(P[i, i].real)
            return float(top), fix_phase(x)
    return float(top), fix_phase(cols[:, 0])  # pragma: no cover


def random_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    G = random_complex((dim, dim), rng)
    return 0.5 * (G + G.conj().T)


def proj_psd(H: np.ndarray) -> np.ndarray:
    """Frobenius-nearest PSD matrix to the Hermitian part of ``H``."""
    w, V = np.linalg.eigh(hermitian_part(H))
    w = np.clip(w, 0.0, None)
    return (V * w) @ V.conj().T
