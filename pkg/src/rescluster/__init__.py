"""Robust cluster enumeration with RES mixture models and finite-sample BIC."""

from .core import ClusterParams, Dataset, HardPartition, MixtureEstimate, ResClusterError, dataset_from_rows
from .criteria import CandidateScore, bic_asymptotic, bic_finite, bic_schwarz, cluster_datafit, epsilon_m
from .datagen import ThreeBlobSpec, gen_t3_pair, gen_three_blobs, place_single_outlier, replace_outliers
from .em import EmConfig, em_fit
from .enumeration import AllCandidatesInvalid, EnumerationResult, enumerate_clusters, hard_cluster
from .fim import fim_blocks, fim_logdet
from .losses import LossModel

__all__ = [
    "AllCandidatesInvalid",
    "CandidateScore",
    "ClusterParams",
    "Dataset",
    "EmConfig",
    "EnumerationResult",
    "HardPartition",
    "LossModel",
    "MixtureEstimate",
    "ResClusterError",
    "ThreeBlobSpec",
    "bic_asymptotic",
    "bic_finite",
    "bic_schwarz",
    "cluster_datafit",
    "dataset_from_rows",
    "em_fit",
    "enumerate_clusters",
    "epsilon_m",
    "fim_blocks",
    "fim_logdet",
    "gen_t3_pair",
    "gen_three_blobs",
    "hard_cluster",
    "place_single_outlier",
    "replace_outliers",
]
