"""EM for mixtures of real elliptically symmetric distributions.

The M-step is the weighted fixed-point update of an M-estimator: each point
enters the centroid and scatter updates with weight ``v_nm * psi(t_nm)``,
where ``t_nm`` is the squared Mahalanobis distance under the previous
iteration's parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import (
    ClusterParams,
    Dataset,
    MixtureEstimate,
    NotPositiveDefinite,
    ResClusterError,
    repair_scatter,
)
from .losses import LossModel, NoDensityGenerator

log = logging.getLogger(__name__)

# candidate medoids examined per cluster in each K-medoids sweep
MEDOID_CANDIDATES = 64
# D-weighted candidates drawn per greedy seeding step (plus ln l)
SEED_TRIALS = 5


class TooManyClusters(ResClusterError, ValueError):
    pass


class DegenerateCluster(ResClusterError, ArithmeticError):
    pass


@dataclass(frozen=True)
class EmConfig:
    max_iters: int = 200
    tol: float = 1e-6
    seed: int = 0
    init_iters: int = 10
    ridge: float = 1e-8
    restarts: int = 1

    def __post_init__(self):
        if self.max_iters < 1 or self.init_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters, init_iters and restarts must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.ridge < 0:
            raise ValueError("ridge must be non-negative")

    def with_seed(self, seed: int) -> "EmConfig":
        return EmConfig(self.max_iters, self.tol, seed, self.init_iters, self.ridge, self.restarts)


def _data_scale(x: np.ndarray) -> float:
    scale = float(np.var(x, axis=0).mean())
    return scale if scale > 0 else 1.0


# -- initialization -----------------------------------------------------------


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (x * x).sum(1)[:, None] - 2.0 * x @ centers.T + (centers * centers).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _seed_medoids(x: np.ndarray, l: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-medoids++ seeding on Euclidean distances.

    Each step draws ``2 + ln l`` candidates with probability proportional to
    their distance from the chosen set and keeps the one that most lowers the
    K-medoids cost (sum of distances). Using distances rather than squared
    distances keeps isolated outliers from dominating the draw.
    """
    n = x.shape[0]
    trials = SEED_TRIALS + int(np.log(l))
    chosen = [int(rng.integers(n))]
    closest = np.sqrt(_sq_dists(x, x[chosen])[:, 0])
    for _ in range(1, l):
        total = closest.sum()
        if total > 0:
            cand = rng.choice(n, size=trials, p=closest / total)
        else:
            # only duplicates of chosen points remain
            cand = rng.choice(np.setdiff1d(np.arange(n), chosen), size=1)
        costs = np.minimum(closest[:, None], np.sqrt(_sq_dists(x, x[cand])))
        best = int(np.argmin(costs.sum(0)))
        chosen.append(int(cand[best]))
        closest = costs[:, best]
    return np.array(chosen)


def _best_medoid(x: np.ndarray, members: np.ndarray) -> int:
    pts = x[members]
    if len(members) > MEDOID_CANDIDATES:
        centre = pts.mean(0, keepdims=True)
        near = np.argsort(_sq_dists(pts, centre)[:, 0], kind="stable")[:MEDOID_CANDIDATES]
    else:
        near = np.arange(len(members))
    cost = np.sqrt(_sq_dists(pts, pts[near])).sum(0)
    return int(members[near[np.argmin(cost)]])


def _assign(x: np.ndarray, medoids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = _sq_dists(x, x[medoids])
    labels = np.argmin(d, axis=1)
    return labels, d[np.arange(x.shape[0]), labels]


def kmedoids_init(data: Dataset, l: int, seed: int = 0, sweeps: int = 10, ridge: float = 1e-8) -> list[ClusterParams]:
    """Initial mixture parameters from a seeded K-medoids partition.

    Medoids become the centroids; each scatter is the average outer product of
    the member deviations from their medoid and each weight is N_m / N.
    """
    n = data.n
    if l > n:
        raise TooManyClusters(f"cannot fit {l} clusters to {n} points")
    x = data.points
    rng = np.random.default_rng(seed)
    if l == n:
        medoids = np.arange(n)
    else:
        medoids = _seed_medoids(x, l, rng)
    labels, _ = _assign(x, medoids)
    reseeded = False
    for _ in range(sweeps):
        updated = medoids.copy()
        for m in range(l):
            members = np.flatnonzero(labels == m)
            if len(members):
                updated[m] = _best_medoid(x, members)
        labels, nearest = _assign(x, updated)
        counts = np.bincount(labels, minlength=l)
        if np.any(counts == 0) and not reseeded:
            for m in np.flatnonzero(counts == 0):
                far = np.argsort(-nearest, kind="stable")
                spare = next((i for i in far if i not in updated), None)
                if spare is None:
                    break  # every point is already a medoid
                updated[m] = spare
                labels, nearest = _assign(x, updated)
            reseeded = True
        elif np.array_equal(updated, medoids):
            break
        medoids = updated
    labels, _ = _assign(x, medoids)

    scale = _data_scale(x)
    clusters = []
    for m in range(l):
        member_pts = x[labels == m]
        mu = x[medoids[m]]
        diff = member_pts - mu
        nm = max(len(member_pts), 1)
        s = repair_scatter(diff.T @ diff / nm, ridge, scale)
        clusters.append(ClusterParams(mu, s, nm / n))
    return _renormalized(clusters)


def _renormalized(clusters: list[ClusterParams]) -> list[ClusterParams]:
    total = sum(c.weight for c in clusters)
    return [c.with_weight(c.weight / total) for c in clusters]


# -- E and M steps ------------------------------------------------------------


def _distances(x: np.ndarray, clusters: list[ClusterParams]) -> np.ndarray:
    """Squared Mahalanobis distances (N, l), batched over components."""
    mus = np.stack([c.mu for c in clusters])
    # inverse Cholesky factors are r x r, so forming them explicitly is cheap
    inv_l = np.linalg.inv(np.stack([c.chol for c in clusters]))
    z = (x[None, :, :] - mus[:, None, :]) @ inv_l.transpose(0, 2, 1)
    # a nearly singular scatter may push distances to inf, which the E-step handles
    with np.errstate(over="ignore"):
        return (z * z).sum(axis=2).T


def _component_terms(x: np.ndarray, clusters: list[ClusterParams], loss: LossModel):
    """Squared distances (N, l) and log of gamma_m |S_m|^{-1/2} g(t_nm)."""
    t = _distances(x, clusters)
    offsets = np.array([np.log(c.weight) - 0.5 * c.logdet for c in clusters])
    return t, loss.log_g(t) + offsets


def _normalize(log_terms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-normalize in log space; returns responsibilities and row log-sums."""
    peak = log_terms.max(axis=1, keepdims=True)
    shifted = np.exp(log_terms - peak)
    total = shifted.sum(axis=1, keepdims=True)
    return shifted / total, (peak + np.log(total))[:, 0]


def e_step(data: Dataset, clusters: list[ClusterParams], loss: LossModel) -> np.ndarray:
    """Responsibilities v_nm, computed in log space."""
    if not loss.has_density:
        raise NoDensityGenerator("the E-step needs a density generator; Tukey's loss has none")
    _, log_terms = _component_terms(data.points, clusters, loss)
    return _normalize(log_terms)[0]


def _m_update(x, resp, t, loss, ridge, scale) -> list[ClusterParams]:
    w = resp * loss.psi(t)
    sizes = resp.sum(0)
    gammas = sizes / sizes.sum()
    eff = w.sum(0)
    bad = np.flatnonzero(~(eff > 1e-12))
    if bad.size:
        raise DegenerateCluster(f"component {bad[0]} has effective weight {eff[bad[0]]:.3e}")
    mus = (w.T @ x) / eff[:, None]
    diff = x[None, :, :] - mus[:, None, :]
    scatters = 2.0 * (diff * w.T[:, :, None]).transpose(0, 2, 1) @ diff / sizes[:, None, None]
    clusters = []
    for m in range(resp.shape[1]):
        s = 0.5 * (scatters[m] + scatters[m].T)
        try:
            clusters.append(ClusterParams(mus[m], s, float(gammas[m])))
            continue
        except NotPositiveDefinite:
            pass
        try:
            s = repair_scatter(s, ridge, scale)
        except NotPositiveDefinite as exc:
            raise DegenerateCluster(f"component {m} scatter collapsed: {exc}") from None
        clusters.append(ClusterParams(mus[m], s, float(gammas[m])))
    return clusters


def m_step(data: Dataset, resp: np.ndarray, loss: LossModel, prev: list[ClusterParams], ridge: float = 1e-8) -> list[ClusterParams]:
    """One M-step; point weights use distances under ``prev``."""
    x = data.points
    t = _distances(x, prev)
    return _m_update(x, resp, t, loss, ridge, _data_scale(x))


def _single_run(data: Dataset, l: int, loss: LossModel, cfg: EmConfig, seed: int) -> MixtureEstimate:
    x = data.points
    scale = _data_scale(x)
    clusters = kmedoids_init(data, l, seed, cfg.init_iters, cfg.ridge)
    t, log_terms = _component_terms(x, clusters, loss)
    resp, row_norm = _normalize(log_terms)
    loglik = float(row_norm.sum())
    trace = [loglik]
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        clusters = _m_update(x, resp, t, loss, cfg.ridge, scale)
        t, log_terms = _component_terms(x, clusters, loss)
        resp, row_norm = _normalize(log_terms)
        new = float(row_norm.sum())
        trace.append(new)
        delta = abs(new - loglik)
        loglik = new
        if delta < cfg.tol:
            converged = True
            break
    if not converged:
        log.debug("EM with l=%d stopped after %d iterations without converging", l, it)
    resp.setflags(write=False)
    return MixtureEstimate(clusters, resp, loglik, it, converged, tuple(trace))


def em_fit(data: Dataset, l: int, loss: LossModel, cfg: EmConfig | None = None) -> MixtureEstimate:
    """Fit an l-component RES mixture by EM, initialized by K-medoids.

    With ``cfg.restarts > 1`` the fit with the highest final log-likelihood is
    kept. Raises :class:`DegenerateCluster` if a component loses all weight.
    """
    cfg = cfg or EmConfig()
    if not loss.has_density:
        raise NoDensityGenerator("EM needs a loss with a density generator (not Tukey)")
    if l > data.n:
        raise TooManyClusters(f"cannot fit {l} clusters to {data.n} points")
    if loss.dim != data.dim:
        raise ValueError(f"loss built for r={loss.dim}, data has r={data.dim}")
    seeds = np.random.SeedSequence(cfg.seed).generate_state(cfg.restarts, dtype=np.uint64)
    best = None
    for s in seeds:
        est = _single_run(data, l, loss, cfg, int(s))
        if best is None or est.loglik > best.loglik:
            best = est
    return best
