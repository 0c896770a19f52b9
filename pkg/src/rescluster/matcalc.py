"""vec/vech, the duplication matrix and Kronecker products.

Conventions: ``vec`` stacks columns; ``vech`` stacks the lower-triangular
part of each column, top to bottom, left to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ResClusterError


class NotSymmetric(ResClusterError, ValueError):
    pass


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int) -> np.ndarray:
    return np.asarray(v).reshape(rows, -1, order="F")


def vech(s: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {s.shape}")
    scale = max(1.0, float(np.abs(s).max(initial=0.0)))
    if np.abs(s - s.T).max(initial=0.0) > tol * scale:
        raise NotSymmetric("matrix is not symmetric")
    # rows of S^T above the diagonal == columns of S below it
    return s.T[np.triu_indices(s.shape[0])]


def unvech(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vech`, returning the symmetric matrix."""
    v = np.asarray(v)
    r = int(round((np.sqrt(8 * v.shape[0] + 1) - 1) / 2))
    if r * (r + 1) // 2 != v.shape[0]:
        raise ValueError(f"length {v.shape[0]} is not triangular")
    out = np.zeros((r, r), dtype=v.dtype)
    rows, cols = np.triu_indices(r)
    out[cols, rows] = v
    out[rows, cols] = v
    return out


@dataclass(frozen=True, eq=False)
class DuplicationMatrix:
    dim: int
    mat: np.ndarray

    @property
    def pinv(self) -> np.ndarray:
        """Moore-Penrose inverse (D^T D)^{-1} D^T; D^T D is diagonal."""
        return self.mat.T / np.diag(self.mat.T @ self.mat)[:, None]


@lru_cache(maxsize=64)
def duplication_matrix(r: int) -> DuplicationMatrix:
    if r < 1:
        raise ValueError("dimension must be positive")
    p = r * (r + 1) // 2
    d = np.zeros((r * r, p))
    rows, cols = np.triu_indices(r)  # (j, i) pairs with i >= j, in vech order
    for k, (j, i) in enumerate(zip(rows, cols)):
        d[i + j * r, k] = 1.0
        d[j + i * r, k] = 1.0
    d.setflags(write=False)
    return DuplicationMatrix(r, d)


def commutation_matrix(m: int, n: int | None = None) -> np.ndarray:
    """K_{m,n} with K vec(A) = vec(A^T) for A of shape (m, n)."""
    n = m if n is None else n
    k = np.zeros((m * n, m * n))
    for i in range(m):
        for j in range(n):
            k[j + i * n, i + j * m] = 1.0
    return k


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))
