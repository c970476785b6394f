"""Dense complex linear algebra for the 2-, 4- and 16-dimensional spaces used here.

Everything is plain ``numpy.ndarray`` with dtype ``complex128``.  Dimensions
never exceed 16, so all storage is dense and all tolerance checks use the
Frobenius norm.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_matrix",
    "as_vector",
    "dagger",
    "frobenius",
    "identity",
    "is_projector",
    "kernel_basis",
    "tensor",
]


def _require_finite(a: np.ndarray) -> None:
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("non-finite entries are not admitted")


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex128 2-D array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    _require_finite(a)
    return a


def as_vector(v) -> np.ndarray:
    """Coerce to a finite complex128 1-D array."""
    a = np.asarray(v, dtype=complex).reshape(-1)
    _require_finite(a)
    return a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def frobenius(a) -> float:
    """Frobenius norm, the single norm used for every tolerance check."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def tensor(a, b) -> np.ndarray:
    """Kronecker product.  Dimensions multiply and (a (x) b)(u (x) v) = au (x) bv."""
    return np.kron(as_matrix(a), as_matrix(b))


def kernel_basis(m, tol: float = 1e-12) -> list[np.ndarray]:
    """Orthonormal basis of the numerical null space of ``m``.

    A vector v belongs to the kernel when ||m v|| <= tol * ||m||_F * ||v||,
    i.e. singular values below ``tol * ||m||_F`` are treated as zero.
    Accepts rectangular input (used for stacked constraint matrices).
    Returns an empty list for a trivial kernel.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(m)
    scale = frobenius(a)
    if scale == 0.0:
        return [identity(a.shape[1])[:, j] for j in range(a.shape[1])]
    _, s, vh = np.linalg.svd(a)
    cutoff = tol * scale
    rank = int(np.sum(s > cutoff))
    return [vh[j].conj() for j in range(rank, a.shape[1])]


def is_projector(m, tol: float = 1e-12) -> bool:
    """True iff ``m`` is Hermitian and idempotent within ``tol`` (Frobenius)."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("is_projector requires a square matrix")
    return frobenius(a - a.conj().T) <= tol and frobenius(a @ a - a) <= tol
