"""Model-selection scores for a fitted, hard-clustered candidate model.

``finite``      data fit - l ln l + (q l / 2) ln 2pi - (1/2) sum ln|J_m|
``asymptotic``  data fit - (q / 2) sum ln eps_m
``schwarz``     data fit - (q l / 2) ln N

with the shared data fit ``sum_m [-sum rho(t_nm) + N_m ln N_m - (N_m/2) ln|S_m|]``
and ``q = r (r + 3) / 2`` parameters per cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ClusterParams, Dataset, HardPartition, MixtureEstimate, ResClusterError
from .fim import SingularBlock, fim_blocks, fim_logdet
from .losses import LOG_2PI, LossModel
from .matcalc import duplication_matrix

PENALTIES = ("finite", "asymptotic", "schwarz")

# the information matrix of a one-point cluster is not a usable penalty, so
# the finite criterion needs two members; the others only need non-empty clusters
FINITE_MIN_SIZE = 2


class InvalidModel(ResClusterError, ValueError):
    pass


@dataclass(frozen=True)
class ClusterTerm:
    n: int
    logdet_scatter: float
    penalty_value: float  # ln|J_m| (finite) or eps_m (asymptotic); nan for schwarz
    pd: bool = True


@dataclass(frozen=True)
class CandidateScore:
    l: int
    datafit: float
    score: float
    penalty_kind: str
    per_cluster: tuple[ClusterTerm, ...] = ()
    valid: bool = True
    reason: str = ""

    @classmethod
    def invalid(cls, l: int, penalty_kind: str, reason: str) -> "CandidateScore":
        return cls(l, float("nan"), float("-inf"), penalty_kind, (), False, reason)


def n_params(r: int) -> int:
    return r * (r + 3) // 2


def _xlogx(n: int) -> float:
    return n * math.log(n) if n > 0 else 0.0


def cluster_datafit(points: np.ndarray, params: ClusterParams, loss: LossModel) -> float:
    pts = np.atleast_2d(points)
    nm = pts.shape[0]
    t = params.mahalanobis(pts)
    return float(-np.sum(loss.rho(t)) + _xlogx(nm) - 0.5 * nm * params.logdet)


def epsilon_m(points: np.ndarray, params: ClusterParams, loss: LossModel) -> float:
    pts = np.atleast_2d(points)
    t = params.mahalanobis(pts)
    return float(max(abs(np.sum(loss.psi(t))), abs(np.sum(loss.eta(t))), pts.shape[0]))


def _check_partition(est: MixtureEstimate, part: HardPartition, min_size: int) -> str:
    if len(part.counts) != est.n_components:
        raise ValueError("partition and estimate disagree on the number of clusters")
    small = [m for m, c in enumerate(part.counts) if c < min_size]
    if small:
        return f"clusters {small} have fewer than {min_size} member(s) after hard assignment"
    return ""


def _datafit(data, est, part, loss):
    fits, groups = [], []
    for m, c in enumerate(est.clusters):
        pts = part.members(data, m)
        groups.append(pts)
        fits.append(cluster_datafit(pts, c, loss))
    return float(sum(fits)), groups


def bic_finite(data: Dataset, est: MixtureEstimate, part: HardPartition, loss_bic: LossModel) -> CandidateScore:
    l = est.n_components
    reason = _check_partition(est, part, FINITE_MIN_SIZE)
    if reason:
        return CandidateScore.invalid(l, "finite", reason)
    fit, groups = _datafit(data, est, part, loss_bic)
    dup = duplication_matrix(data.dim)
    q = n_params(data.dim)
    terms, logdets = [], []
    for pts, c in zip(groups, est.clusters):
        try:
            ld = fim_logdet(fim_blocks(pts, c, loss_bic, dup))
        except SingularBlock as exc:
            return CandidateScore.invalid(l, "finite", f"singular information matrix: {exc}")
        logdets.append(ld.value)
        terms.append(ClusterTerm(len(pts), c.logdet, ld.value, ld.positive_definite))
    score = fit - _xlogx(l) + 0.5 * q * l * LOG_2PI - 0.5 * sum(logdets)
    return CandidateScore(l, fit, float(score), "finite", tuple(terms))


def bic_asymptotic(data: Dataset, est: MixtureEstimate, part: HardPartition, loss_bic: LossModel) -> CandidateScore:
    l = est.n_components
    reason = _check_partition(est, part, 1)
    if reason:
        return CandidateScore.invalid(l, "asymptotic", reason)
    fit, groups = _datafit(data, est, part, loss_bic)
    q = n_params(data.dim)
    eps = [epsilon_m(pts, c, loss_bic) for pts, c in zip(groups, est.clusters)]
    terms = tuple(ClusterTerm(len(p), c.logdet, e) for p, c, e in zip(groups, est.clusters, eps))
    score = fit - 0.5 * q * float(np.sum(np.log(eps)))
    return CandidateScore(l, fit, float(score), "asymptotic", terms)


def bic_schwarz(data: Dataset, est: MixtureEstimate, part: HardPartition, loss_bic: LossModel) -> CandidateScore:
    l = est.n_components
    reason = _check_partition(est, part, 1)
    if reason:
        return CandidateScore.invalid(l, "schwarz", reason)
    fit, groups = _datafit(data, est, part, loss_bic)
    q = n_params(data.dim)
    terms = tuple(ClusterTerm(len(p), c.logdet, float("nan")) for p, c in zip(groups, est.clusters))
    return CandidateScore(l, fit, float(fit - 0.5 * q * l * math.log(data.n)), "schwarz", terms)


CRITERIA = {"finite": bic_finite, "asymptotic": bic_asymptotic, "schwarz": bic_schwarz}


def score_candidate(data, est, part, loss_bic, penalty: str) -> CandidateScore:
    try:
        fn = CRITERIA[penalty]
    except KeyError:
        raise ValueError(f"unknown penalty {penalty!r}; expected one of {PENALTIES}") from None
    return fn(data, est, part, loss_bic)
