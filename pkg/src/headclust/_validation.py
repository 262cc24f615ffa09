"""Input validation shared by the clustering code."""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.utils import check_array

DISTANCES = ("sql2", "l2", "l1", "cosine")
INITS = ("kpp", "random", "firstk")


def check_matrix(X) -> sp.csr_matrix:
    """Coerce a FeatureMatrix, matrix file, sparse or dense input to CSR float64."""
    if hasattr(X, "to_csr"):
        X = X.to_csr()
    X = check_array(X, accept_sparse="csr", dtype=np.float64, ensure_min_samples=1,
                    ensure_min_features=0)
    if not sp.issparse(X):
        X = sp.csr_matrix(X)
    X.sort_indices()
    return X


def is_binary(X: sp.csr_matrix) -> bool:
    return bool(np.all(X.data == 1.0))


def check_distance(distance) -> str:
    kind = getattr(distance, "kind", distance)
    if kind not in DISTANCES:
        raise ValueError(f"distance must be one of {DISTANCES}, got {distance!r}")
    return kind


def check_init(init) -> str:
    aliases = {"k-means++": "kpp", "random-rows": "random", "first-k-rows": "firstk"}
    init = aliases.get(init, init)
    if init not in INITS:
        raise ValueError(f"init must be one of {INITS}, got {init!r}")
    return init


def check_k(k, n_rows: int) -> int:
    if not isinstance(k, numbers.Integral) or isinstance(k, bool):
        raise ValueError(f"k must be an integer, got {k!r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n_rows:
        raise ValueError(f"k={k} exceeds the number of rows ({n_rows})")
    return int(k)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_centroids(centroids, dim: int) -> np.ndarray:
    C = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if C.ndim != 2 or C.shape[1] != dim:
        raise ValueError(f"centroids have shape {C.shape}, expected (k, {dim})")
    if C.shape[0] < 1:
        raise ValueError("at least one centroid is required")
    return C
