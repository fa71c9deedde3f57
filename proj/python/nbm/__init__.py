"""Nested block models for random networks.

Thin python surface over the C++ core: synthetic generation, two-level
clustering (subspace meta-communities, spectral k-median communities),
rank-one block estimation, model selection, and the matching accuracy
metrics.
"""

from ._nbm import (
    ModelError,
    NumericError,
    cluster_communities,
    clustering_error,
    default_gammas,
    estimation_error,
    fit,
    generate,
    objective,
    rank_one_project,
    select,
    ssc_cluster,
)

__all__ = [
    "ModelError",
    "NumericError",
    "cluster_communities",
    "clustering_error",
    "default_gammas",
    "estimation_error",
    "fit",
    "generate",
    "objective",
    "rank_one_project",
    "select",
    "ssc_cluster",
]
