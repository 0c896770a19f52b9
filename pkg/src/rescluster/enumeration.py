"""Two-step cluster enumeration: fit each candidate l, hard-cluster, score."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import Dataset, HardPartition, MixtureEstimate, ResClusterError
from .criteria import PENALTIES, CandidateScore, score_candidate
from .em import DegenerateCluster, EmConfig, em_fit
from .losses import LossModel, NoDensityGenerator

log = logging.getLogger(__name__)


class AllCandidatesInvalid(ResClusterError, RuntimeError):
    pass


@dataclass(frozen=True)
class EnumerationResult:
    l_min: int
    l_max: int
    scores: tuple[CandidateScore, ...]
    k_hat: int
    em_loss: str
    bic_loss: str
    penalty: str

    def score_of(self, l: int) -> CandidateScore:
        return self.scores[l - self.l_min]

    def curve(self) -> dict[int, float]:
        return {s.l: s.score for s in self.scores}


def hard_cluster(est: MixtureEstimate) -> HardPartition:
    """Assign each point to its most responsible component (first index on ties)."""
    labels = np.argmax(est.responsibilities, axis=1)
    return HardPartition.from_labels(labels, est.n_components)


def select_k(scores) -> int:
    """argmax over valid scores; ties resolve toward the smaller l."""
    best = None
    for s in scores:
        if s.valid and np.isfinite(s.score) and (best is None or s.score > best.score):
            best = s
    if best is None:
        raise AllCandidatesInvalid("no candidate model produced a valid score")
    return best.l


def candidate_seed(seed: int, l: int) -> int:
    return int(np.random.SeedSequence([seed, l]).generate_state(1, dtype=np.uint64)[0])


def score_range(
    data: Dataset,
    l_min: int,
    l_max: int,
    em_loss: LossModel,
    bic_loss: LossModel,
    penalties=PENALTIES,
    cfg: EmConfig | None = None,
) -> dict[str, list[CandidateScore]]:
    """Fit every candidate once and score it under each requested penalty."""
    cfg = cfg or EmConfig()
    if not em_loss.has_density:
        raise NoDensityGenerator(f"EM loss {em_loss.kind!r} has no density generator; use gaussian, t or huber")
    if not (1 <= l_min <= l_max <= data.n):
        raise ValueError(f"need 1 <= l_min <= l_max <= N, got l_min={l_min}, l_max={l_max}, N={data.n}")
    out = {p: [] for p in penalties}
    for l in range(l_min, l_max + 1):
        try:
            est = em_fit(data, l, em_loss, cfg.with_seed(candidate_seed(cfg.seed, l)))
        except DegenerateCluster as exc:
            log.debug("candidate l=%d discarded: %s", l, exc)
            for p in penalties:
                out[p].append(CandidateScore.invalid(l, p, f"degenerate EM: {exc}"))
            continue
        part = hard_cluster(est)
        for p in penalties:
            out[p].append(score_candidate(data, est, part, bic_loss, p))
    return out


def enumerate_clusters(
    data: Dataset,
    l_min: int,
    l_max: int,
    em_loss: LossModel,
    bic_loss: LossModel,
    penalty: str = "finite",
    cfg: EmConfig | None = None,
) -> EnumerationResult:
    scores = score_range(data, l_min, l_max, em_loss, bic_loss, (penalty,), cfg)[penalty]
    return EnumerationResult(l_min, l_max, tuple(scores), select_k(scores), em_loss.kind, bic_loss.kind, penalty)
