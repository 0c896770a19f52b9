import numpy as np
import pytest

from rescluster.core import ClusterParams, Dataset, MixtureEstimate
from rescluster.criteria import CandidateScore
from rescluster.datagen import ThreeBlobSpec, gen_three_blobs, replace_outliers
from rescluster.em import EmConfig
from rescluster.enumeration import AllCandidatesInvalid, enumerate_clusters, hard_cluster, select_k
from rescluster.losses import LossModel, NoDensityGenerator


def _est(resp):
    resp = np.asarray(resp, float)
    cl = [ClusterParams(np.zeros(1), np.eye(1), 1 / resp.shape[1]) for _ in range(resp.shape[1])]
    return MixtureEstimate(cl, resp, 0.0, 1, True)


def test_hard_cluster_examples():
    p = hard_cluster(_est([[0.9, 0.1], [0.2, 0.8]]))
    assert list(p.labels) == [0, 1] and list(p.counts) == [1, 1]
    assert list(hard_cluster(_est([[0.5, 0.5]])).labels) == [0]
    p = hard_cluster(_est(np.ones((4, 1))))
    assert list(p.counts) == [4]


def _scores(vals):
    return [CandidateScore(l, 0.0, v, "finite") if np.isfinite(v) else CandidateScore.invalid(l, "finite", "x")
            for l, v in enumerate(vals, start=1)]


def test_select_k_ties_and_invalid():
    assert select_k(_scores([1.0, 3.0, 3.0])) == 2
    assert select_k(_scores([-np.inf, 2.0, 1.0])) == 2
    with pytest.raises(AllCandidatesInvalid):
        select_k(_scores([-np.inf, -np.inf]))


def test_select_k_shift_invariance():
    vals = np.array([1.0, 5.0, 4.0, -2.0])
    assert select_k(_scores(vals)) == select_k(_scores(vals + 1234.5))


def test_clean_blobs_detected():
    data, _ = gen_three_blobs(ThreeBlobSpec(250), 0)
    res = enumerate_clusters(data, 1, 6, LossModel.gaussian(2), LossModel.gaussian(2), "finite", EmConfig(seed=0))
    assert res.k_hat == 3 and len(res.scores) == 6
    assert res.score_of(3).valid


def test_robust_combo_under_contamination():
    data, _ = gen_three_blobs(ThreeBlobSpec(250), 2)
    data, _ = replace_outliers(data, 0.1, seed=2)
    res = enumerate_clusters(data, 1, 6, LossModel.huber(2), LossModel.tukey(2), "finite", EmConfig(seed=2))
    assert res.k_hat == 3
    gauss = enumerate_clusters(data, 1, 6, LossModel.gaussian(2), LossModel.gaussian(2), "finite", EmConfig(seed=2))
    assert gauss.k_hat != 3


def test_degenerate_range():
    data, _ = gen_three_blobs(ThreeBlobSpec(30), 0)
    res = enumerate_clusters(data, 3, 3, LossModel.huber(2), LossModel.huber(2), "asymptotic")
    assert res.k_hat == 3 and len(res.scores) == 1


def test_tukey_em_rejected_before_fitting():
    data, _ = gen_three_blobs(ThreeBlobSpec(5), 0)
    with pytest.raises(NoDensityGenerator):
        enumerate_clusters(data, 1, 2, LossModel.tukey(2), LossModel.tukey(2))


def test_range_checked():
    data = Dataset(np.random.default_rng(0).standard_normal((4, 2)))
    with pytest.raises(ValueError):
        enumerate_clusters(data, 2, 5, LossModel.huber(2), LossModel.huber(2))


def test_deterministic():
    data, _ = gen_three_blobs(ThreeBlobSpec(40), 1)
    a = enumerate_clusters(data, 1, 5, LossModel.student_t(2), LossModel.tukey(2), "finite", EmConfig(seed=3))
    b = enumerate_clusters(data, 1, 5, LossModel.student_t(2), LossModel.tukey(2), "finite", EmConfig(seed=3))
    assert a.curve() == b.curve() and a.k_hat == b.k_hat
