"""Shared containers: datasets, cluster parameters, mixture fits and partitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import cho_solve, solve_triangular


_TINY = np.finfo(float).tiny


class ResClusterError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(ResClusterError, ValueError):
    pass


class NonFiniteEntry(ResClusterError, ValueError):
    def __init__(self, row: int, col: int):
        super().__init__(f"non-finite entry at row {row}, column {col}")
        self.row = row
        self.col = col


class DimensionMismatch(ResClusterError, ValueError):
    pass


class NotPositiveDefinite(ResClusterError, np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """N observations of dimension r, stored row-wise."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D array, got shape {pts.shape}")
        if pts.shape[0] == 0 or pts.shape[1] == 0:
            raise EmptyInput("dataset has no rows or no columns")
        bad = np.argwhere(~np.isfinite(pts))
        if len(bad):
            raise NonFiniteEntry(int(bad[0, 0]), int(bad[0, 1]))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n


def dataset_from_rows(rows) -> Dataset:
    """Validate a row-major table of observations and wrap it as a :class:`Dataset`."""
    arr = np.asarray(rows, dtype=float)
    if arr.size == 0:
        raise EmptyInput("no observations supplied")
    if arr.ndim == 1:
        raise DimensionMismatch("rows must be a 2-D table; got a flat vector")
    return Dataset(arr)


def cholesky_lower(scatter: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(scatter)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def repair_scatter(scatter: np.ndarray, ridge: float = 1e-8, fallback_scale: float = 1.0) -> np.ndarray:
    """Symmetrize ``scatter`` and make it Cholesky-factorizable.

    If the factorization fails, ``ridge * trace(S)/r`` is added to the diagonal
    and the factorization retried once. A zero-trace matrix (e.g. the scatter
    of a single point) is ridged relative to ``fallback_scale`` instead.
    """
    s = 0.5 * (scatter + scatter.T)
    try:
        np.linalg.cholesky(s)
        return s
    except np.linalg.LinAlgError:
        pass
    r = s.shape[0]
    scale = np.trace(s) / r
    if not np.isfinite(scale) or scale <= 0.0:
        scale = fallback_scale
    s = s + ridge * scale * np.eye(r)
    cholesky_lower(s)
    return s


@dataclass(frozen=True, eq=False)
class ClusterParams:
    """Centroid, scatter matrix and mixing weight of one mixture component."""

    mu: np.ndarray
    scatter: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        s = np.array(self.scatter, dtype=float)
        r = mu.shape[0]
        if s.shape != (r, r):
            raise DimensionMismatch(f"scatter shape {s.shape} does not match centroid length {r}")
        scale = max(np.abs(s).max(), _TINY)
        if np.abs(s - s.T).max() > 1e-12 * scale:
            raise NotPositiveDefinite("scatter matrix is not symmetric")
        if not (0.0 < self.weight <= 1.0):
            raise ValueError(f"mixing weight must lie in (0, 1], got {self.weight}")
        mu.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "scatter", s)
        # fail at construction time rather than first use
        object.__setattr__(self, "chol", cholesky_lower(s))
        self.chol.setflags(write=False)

    chol: np.ndarray = field(init=False, repr=False)

    @property
    def dim(self) -> int:
        return self.mu.shape[0]

    @cached_property
    def logdet(self) -> float:
        """ln|S| from the Cholesky diagonal."""
        return 2.0 * float(np.log(np.diag(self.chol)).sum())

    def whiten(self, x: np.ndarray) -> np.ndarray:
        """Return L^{-1}(x - mu) row-wise, with S = L L^T."""
        diff = np.atleast_2d(x) - self.mu
        return solve_triangular(self.chol, diff.T, lower=True, check_finite=False).T

    def solve(self, b: np.ndarray) -> np.ndarray:
        return cho_solve((self.chol, True), b, check_finite=False)

    def mahalanobis(self, x: np.ndarray) -> np.ndarray:
        """Squared Mahalanobis distances of the rows of ``x``."""
        z = self.whiten(x)
        return np.einsum("ij,ij->i", z, z)

    def with_weight(self, weight: float) -> "ClusterParams":
        return ClusterParams(self.mu, self.scatter, weight)


def mahalanobis_sq(x, params: ClusterParams) -> float:
    """(x - mu)^T S^{-1} (x - mu) for a single observation."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != params.dim:
        raise DimensionMismatch(f"point has dimension {x.shape[0]}, cluster has {params.dim}")
    return float(params.mahalanobis(x[None, :])[0])


@dataclass(frozen=True, eq=False)
class MixtureEstimate:
    clusters: list[ClusterParams]
    responsibilities: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    loglik_trace: tuple[float, ...] = ()

    @property
    def n_components(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True, eq=False)
class HardPartition:
    """Hard cluster memberships; ``labels`` are 0-based component indices."""

    labels: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_labels(cls, labels, n_components: int) -> "HardPartition":
        labels = np.asarray(labels, dtype=np.intp)
        counts = np.bincount(labels, minlength=n_components)
        return cls(labels, counts)

    def members(self, data: Dataset, m: int) -> np.ndarray:
        return data.points[self.labels == m]
