"""scikit-learn compatible estimators wrapping the fit functions."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_distance, check_matrix
from ._core import DEFAULT_MAX_ITER, DEFAULT_TOL, assign, fit_best
from ._distance import pairwise


class _BaseClustering(ClusterMixin, TransformerMixin, BaseEstimator):
    _variant = "means"

    def _fit_params(self) -> dict:
        return {"distance": self.distance, "init": self.init, "max_iter": self.max_iter,
                "tol": self.tol, "n_threads": self.n_threads}

    def fit(self, X, y=None):
        X = check_matrix(X)
        res = fit_best(X, self.n_clusters, variant=self._variant, restarts=self.n_init,
                       seed=self.random_state, **self._fit_params())
        self.result_ = res
        self.labels_ = res.assignments
        self.cluster_centers_ = res.centroids
        self.inertia_ = res.inertia
        self.n_iter_ = res.iterations_run
        self.inertia_trace_ = np.asarray(res.inertia_trace)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        """Nearest fitted centroid for each row (ties to the lowest index)."""
        check_is_fitted(self, "cluster_centers_")
        X = self._check_new(X)
        return assign(X, self.cluster_centers_, self.distance, self.n_threads)

    def transform(self, X):
        """Distance from each row to each centroid, shape (n_samples, n_clusters)."""
        check_is_fitted(self, "cluster_centers_")
        X = self._check_new(X)
        return pairwise(X, self.cluster_centers_, check_distance(self.distance), self.n_threads)

    def score(self, X, y=None):
        """Negative inertia of ``X`` under the fitted centroids."""
        D = self.transform(X)
        return -float(D.min(axis=1).sum())

    def _check_new(self, X):
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, fitted on {self.n_features_in_}")
        return X


class KMeans(_BaseClustering):
    """Lloyd K-means on sparse binary rows with dense centroids.

    Parameters
    ----------
    n_clusters : int, default=8
    distance : {"sql2", "l2", "l1", "cosine"}, default="sql2"
        Distance in the assignment step and the inertia. Centroids are
        always member means.
    init : {"kpp", "random", "firstk"}, default="kpp"
    n_init : int, default=1
        Number of seeded restarts; the lowest inertia wins.
    max_iter : int, default=300
    tol : float, default=1e-4
        Relative inertia change that counts as converged.
    random_state : int or None, default=0
    n_threads : int or None
        Threads for the assignment step; results do not depend on it.

    Attributes
    ----------
    labels_, cluster_centers_, inertia_, n_iter_, inertia_trace_, result_
    """

    def __init__(self, n_clusters=8, distance="sql2", init="kpp", n_init=1,
                 max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL, random_state=0, n_threads=None):
        self.n_clusters = n_clusters
        self.distance = distance
        self.init = init
        self.n_init = n_init
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.n_threads = n_threads


class KMedian(KMeans):
    """K-means variant whose centroids are coordinate-wise lower medians."""

    _variant = "median"


class KMedoids(KMeans):
    """K-means variant whose centroids are cluster members (medoids).

    ``medoid_indices_`` holds the row index of each medoid.
    """

    _variant = "medoids"

    def fit(self, X, y=None):
        super().fit(X, y)
        self.medoid_indices_ = np.asarray(self.result_.medoid_indices)
        return self


class MiniBatchKMeans(_BaseClustering):
    """Mini-batch K-means (per-center 1/count learning rate).

    Parameters as :class:`KMeans`, plus ``batch_size`` and ``n_batches``.
    """

    _variant = "minibatch"

    def __init__(self, n_clusters=8, distance="sql2", init="kpp", n_init=1, batch_size=100,
                 n_batches=100, random_state=0, n_threads=None):
        self.n_clusters = n_clusters
        self.distance = distance
        self.init = init
        self.n_init = n_init
        self.batch_size = batch_size
        self.n_batches = n_batches
        self.random_state = random_state
        self.n_threads = n_threads

    def _fit_params(self):
        return {"distance": self.distance, "init": self.init, "batch_size": self.batch_size,
                "n_batches": self.n_batches, "n_threads": self.n_threads}
