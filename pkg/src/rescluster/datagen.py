"""Seeded synthetic data: the three-blob benchmark, outlier contamination, t_3 pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Dataset, DimensionMismatch

OUTLIER_RANGE = (-20.0, 20.0)


def _default_means():
    return (np.array([0.0, 5.0]), np.array([5.0, 0.0]), np.array([-5.0, 0.0]))


def _default_covs():
    return (
        np.array([[2.0, 0.5], [0.5, 0.5]]),
        np.array([[1.0, 0.0], [0.0, 0.1]]),
        np.array([[2.0, -0.5], [-0.5, 0.5]]),
    )


def _rng(seed, *stream) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *stream])))


@dataclass(frozen=True, eq=False)
class ThreeBlobSpec:
    """Three Gaussian clusters in the plane.

    ``n_per_cluster`` is either one count used for every component or a
    sequence of three counts (for imbalanced designs).
    """

    n_per_cluster: int | tuple[int, int, int] = 250
    means: tuple = field(default_factory=_default_means)
    covs: tuple = field(default_factory=_default_covs)

    def __post_init__(self):
        counts = self.n_per_cluster
        counts = (counts,) * 3 if np.isscalar(counts) else tuple(counts)
        if len(counts) != 3 or any(int(c) < 1 for c in counts):
            raise ValueError(f"need three positive cluster sizes, got {self.n_per_cluster!r}")
        if len(self.means) != 3 or len(self.covs) != 3:
            raise ValueError("exactly three components are required")
        for cov in self.covs:
            np.linalg.cholesky(np.asarray(cov, dtype=float))
        object.__setattr__(self, "n_per_cluster", tuple(int(c) for c in counts))

    @property
    def total(self) -> int:
        return sum(self.n_per_cluster)


def gen_three_blobs(spec: ThreeBlobSpec, seed: int) -> tuple[Dataset, np.ndarray]:
    """Sample the benchmark; labels are 0-based component indices."""
    blocks, labels = [], []
    for k, (n, mu, cov) in enumerate(zip(spec.n_per_cluster, spec.means, spec.covs)):
        # one stream per component so changing N_k of one cluster leaves the others intact
        z = _rng(seed, 0, k).standard_normal((n, len(mu)))
        blocks.append(np.asarray(mu) + z @ np.linalg.cholesky(np.asarray(cov)).T)
        labels.append(np.full(n, k))
    return Dataset(np.vstack(blocks)), np.concatenate(labels)


def replace_outliers(
    data: Dataset, eps: float, lo: float = OUTLIER_RANGE[0], hi: float = OUTLIER_RANGE[1], seed: int = 0
) -> tuple[Dataset, np.ndarray]:
    """Replace floor(eps N) randomly chosen rows by Uniform[lo, hi]^r draws."""
    if not (0.0 <= eps < 1.0):
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if not lo < hi:
        raise ValueError("need lo < hi")
    n = data.n
    # the tiny offset keeps e.g. 0.1 * 750 from flooring to 74
    n_out = int(math.floor(eps * n + 1e-9))
    mask = np.zeros(n, dtype=bool)
    if n_out == 0:
        return data, mask
    rng = _rng(seed, 1)
    idx = rng.choice(n, size=n_out, replace=False)
    pts = np.array(data.points)
    pts[idx] = rng.uniform(lo, hi, size=(n_out, data.dim))
    mask[idx] = True
    return Dataset(pts), mask


def place_single_outlier(data: Dataset, position, seed: int = 0) -> Dataset:
    pos = np.asarray(position, dtype=float).reshape(-1)
    if pos.shape[0] != data.dim:
        raise DimensionMismatch(f"outlier has dimension {pos.shape[0]}, data has {data.dim}")
    idx = int(_rng(seed, 2).integers(data.n))
    pts = np.array(data.points)
    pts[idx] = pos
    return Dataset(pts)


def gen_t3_pair(r: int, n_per_cluster: int, separation: float = 15.0, seed: int = 0, nu: float = 3.0) -> tuple[Dataset, np.ndarray]:
    """Two multivariate t clusters at 0 and ``separation * 1`` with identity scatter."""
    if r < 1 or n_per_cluster < 1:
        raise ValueError("r and n_per_cluster must be positive")
    blocks = []
    for k, centre in enumerate((0.0, separation)):
        rng = _rng(seed, 3, k)
        z = rng.standard_normal((n_per_cluster, r))
        w = rng.chisquare(nu, size=n_per_cluster)
        blocks.append(centre + z / np.sqrt(w / nu)[:, None])
    labels = np.repeat(np.arange(2), n_per_cluster)
    return Dataset(np.vstack(blocks)), labels
