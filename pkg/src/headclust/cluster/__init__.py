"""K-means and variants over sparse binary rows, plus elbow curves."""

from ._core import (
    VARIANTS,
    ClusteringResult,
    assign,
    compute_inertia,
    fit_best,
    kmeans_fit,
    kmedian_fit,
    kmedoids_fit,
    medoid_of,
    update_medians,
    minibatch_kmeans_fit,
    restart_seeds,
    update_means,
)
from ._distance import dense_distance, pairwise
from .elbow import ElbowCurve, elbow_curve
from .estimators import KMeans, KMedian, KMedoids, MiniBatchKMeans

__all__ = [
    "VARIANTS", "ClusteringResult", "ElbowCurve", "KMeans", "KMedian", "KMedoids",
    "MiniBatchKMeans", "assign", "compute_inertia", "dense_distance", "elbow_curve",
    "fit_best", "kmeans_fit", "kmedian_fit", "kmedoids_fit", "medoid_of",
    "minibatch_kmeans_fit", "pairwise", "restart_seeds", "update_means", "update_medians",
]
