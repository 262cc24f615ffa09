"""Lloyd-style clustering: K-means, k-medoids, k-median and mini-batch K-means.

All fit functions work on a CSR matrix of rows (usually sparse 0/1 feature
vectors) and keep dense centroids. They run a single initialization; the
estimators and :func:`fit_best` handle restarts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .._validation import (
    check_centroids,
    check_distance,
    check_init,
    check_k,
    check_matrix,
    check_positive_int,
    is_binary,
)
from ._distance import pairwise, row_ids, row_sq_norms

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-4


@dataclass(frozen=True)
class ClusteringResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations_run: int
    inertia_trace: tuple
    seed: Optional[int]
    k: int
    distance: str
    variant: str = "means"
    zero_rows: tuple = ()
    medoid_indices: Optional[tuple] = None
    restart_seeds: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.inertia_trace) != self.iterations_run:
            raise ValueError("inertia_trace length must equal iterations_run")

    def same_as(self, other: "ClusteringResult") -> bool:
        """Bitwise equality of every fitted quantity."""
        return (
            np.array_equal(self.assignments, other.assignments)
            and np.array_equal(self.centroids, other.centroids)
            and self.inertia == other.inertia
            and tuple(self.inertia_trace) == tuple(other.inertia_trace)
            and self.iterations_run == other.iterations_run
            and self.seed == other.seed
        )

    def metadata(self) -> dict:
        return {
            "variant": self.variant,
            "k": self.k,
            "distance": self.distance,
            "seed": self.seed,
            "inertia": self.inertia,
            "iterations": self.iterations_run,
            "inertia_trace": list(self.inertia_trace),
            "zero_rows": len(self.zero_rows),
            "restart_seeds": list(self.restart_seeds),
        }


# -- elementary steps -------------------------------------------------------

class _Rows:
    """A validated CSR matrix with the per-row quantities every step reuses."""

    def __init__(self, X: sp.csr_matrix, kind: str, n_threads=None):
        self.X = X
        self.kind = kind
        self.n_threads = n_threads
        self.n, self.dim = X.shape
        self.rid = row_ids(X)
        self.sqx = row_sq_norms(X)
        self.binary = is_binary(X)

    def dist(self, C) -> np.ndarray:
        return pairwise(self.X, C, self.kind, self.n_threads, self.sqx)

    def dense(self, rows) -> np.ndarray:
        return self.X[rows].toarray()

    def cluster_sums(self, a, k) -> np.ndarray:
        """(k, dim) coordinate sums per cluster, accumulated in row order."""
        flat = a[self.rid] * self.dim + self.X.indices
        return np.bincount(flat, weights=self.X.data, minlength=k * self.dim).reshape(k, self.dim)


def _point_distances(rows: _Rows, a, C) -> np.ndarray:
    return rows.dist(C)[np.arange(rows.n), a]


def compute_inertia(matrix, assignments, centroids, distance="sql2", n_threads=None) -> float:
    """Sum over rows of the distance to the row's assigned centroid (no averaging)."""
    X = check_matrix(matrix)
    kind = check_distance(distance)
    C = check_centroids(centroids, X.shape[1])
    a = np.asarray(assignments, dtype=np.int64)
    if a.shape != (X.shape[0],):
        raise ValueError(f"{a.shape[0] if a.ndim else 0} assignments for {X.shape[0]} rows")
    if a.size and (a.min() < 0 or a.max() >= C.shape[0]):
        raise ValueError("assignment refers to a missing centroid")
    return float(np.sum(_point_distances(_Rows(X, kind, n_threads), a, C)))


def assign(matrix, centroids, distance="sql2", n_threads=None) -> np.ndarray:
    """Index of the nearest centroid for every row; ties go to the lowest index."""
    X = check_matrix(matrix)
    C = check_centroids(centroids, X.shape[1])
    return _assign(_Rows(X, check_distance(distance), n_threads), C)[0]


def _assign(rows: _Rows, C):
    D = rows.dist(C)
    a = np.argmin(D, axis=1)
    return a, D[np.arange(rows.n), a]


def update_means(matrix, assignments, k, previous=None) -> np.ndarray:
    """Coordinate-wise mean of each cluster's members.

    A cluster with no members keeps its ``previous`` centroid (zeros if none is
    given); the fit loops repair empty clusters before this step is reached.
    """
    rows = _Rows(check_matrix(matrix), "sql2")
    return _update_means(rows, np.asarray(assignments, dtype=np.int64), k, previous)


def update_medians(matrix, assignments, k, previous=None) -> np.ndarray:
    """Coordinate-wise lower median of each cluster's members."""
    rows = _Rows(check_matrix(matrix), "sql2")
    return _update_medians(rows, np.asarray(assignments, dtype=np.int64), k, previous)


def _update_means(rows: _Rows, a, k, previous=None):
    sums = rows.cluster_sums(a, k)
    counts = np.bincount(a, minlength=k).astype(np.float64)
    C = np.zeros((k, rows.dim)) if previous is None else np.array(previous, dtype=np.float64)
    filled = counts > 0
    C[filled] = sums[filled] / counts[filled, None]
    return C


def _update_medians(rows: _Rows, a, k, previous=None):
    counts = np.bincount(a, minlength=k)
    C = np.zeros((k, rows.dim)) if previous is None else np.array(previous, dtype=np.float64)
    if rows.binary:
        # sorted 0/1 column: the lower middle entry is 1 iff ones >= t - (t-1)//2
        ones = rows.cluster_sums(a, k)
        for c in np.flatnonzero(counts):
            t = counts[c]
            C[c] = (ones[c] >= t - (t - 1) // 2).astype(np.float64)
        return C
    for c in np.flatnonzero(counts):
        members = rows.dense(np.flatnonzero(a == c))
        t = members.shape[0]
        C[c] = np.sort(members, axis=0)[(t - 1) // 2]
    return C


def medoid_of(X, members: np.ndarray, kind: str, n_threads=None) -> int:
    """Row (from ``members``, sorted ascending) minimizing the summed distance to the others.

    Ties resolve to the lowest row index.
    """
    members = np.sort(np.asarray(members, dtype=np.int64))
    if len(members) == 1:
        return int(members[0])
    M = X[members]
    if kind == "sql2" or (kind == "l1" and is_binary(M)):
        # sum_j |x_h - x_j|^2 = t|x_h|^2 + sum_j |x_j|^2 - 2 x_h . S; binary l1 is the same quantity
        sq = np.asarray(M.multiply(M).sum(axis=1)).ravel()
        S = np.asarray(M.sum(axis=0)).ravel()
        cost = len(members) * sq + sq.sum() - 2.0 * (M @ S)
    else:
        cost = np.zeros(len(members))
        block = 512
        for s in range(0, len(members), block):
            cand = M[s:s + block].toarray()
            cost[s:s + block] = pairwise(M, cand, kind, n_threads).sum(axis=0)
    return int(members[int(np.argmin(cost))])


def _update_medoids(rows: _Rows, a, k, previous_idx):
    idx = list(previous_idx)
    for c in range(k):
        members = np.flatnonzero(a == c)
        if len(members):
            idx[c] = medoid_of(rows.X, members, rows.kind, rows.n_threads)
    return idx


def _repair_empty(a, point_dist, k):
    """Move the farthest point of a multi-member cluster into each empty cluster.

    Returns (assignments, moved_rows). Farthest-point ties go to the lowest row.
    """
    counts = np.bincount(a, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if not len(empty):
        return a, []
    a = a.copy()
    d = point_dist.astype(np.float64).copy()
    moved = []
    for c in empty:
        eligible = counts[a] > 1
        if not eligible.any():
            break
        cand = np.where(eligible, d, -np.inf)
        r = int(np.argmax(cand))
        counts[a[r]] -= 1
        counts[c] += 1
        a[r] = c
        d[r] = -np.inf
        moved.append(r)
    return a, moved


# -- initialization ---------------------------------------------------------

def init_rows(rows: _Rows, k, init, rng: np.random.Generator) -> np.ndarray:
    """Pick ``k`` distinct row indices to seed the centroids."""
    n, kind = rows.n, rows.kind
    init = check_init(init)
    if init == "firstk":
        return np.arange(k)
    if init == "random":
        return np.sort(rng.choice(n, size=k, replace=False))
    chosen = [int(rng.integers(n))]
    taken = np.zeros(n, dtype=bool)
    taken[chosen[0]] = True
    nearest = rows.dist(rows.dense([chosen[0]]))[:, 0]
    while len(chosen) < k:
        w = nearest if kind == "sql2" else nearest ** 2
        w = np.where(taken, 0.0, w)
        total = w.sum()
        if total > 0:
            r = int(rng.choice(n, p=w / total))
        else:
            # all remaining rows coincide with a chosen one
            r = int(rng.choice(np.flatnonzero(~taken)))
        chosen.append(r)
        taken[r] = True
        nearest = np.minimum(nearest, rows.dist(rows.dense([r]))[:, 0])
    return np.asarray(chosen)


def _zero_rows(X) -> tuple:
    return tuple(int(i) for i in np.flatnonzero(np.diff(X.indptr) == 0))


def _resolve_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().generate_state(1)[0])
    return int(seed)


# -- fit loops --------------------------------------------------------------

def _lloyd(rows: _Rows, k, C, update: Callable, max_iter, tol, medoids=None):
    trace = []
    prev_a = None
    a = None
    for _ in range(max_iter):
        a, dist = _assign(rows, C)
        a, moved = _repair_empty(a, dist, k)
        if medoids is not None:
            medoids = _update_medoids(rows, a, k, medoids)
            C = rows.dense(medoids)
        else:
            C = update(rows, a, k, C)
        J = float(np.sum(_point_distances(rows, a, C)))
        prev_J = trace[-1] if trace else None
        trace.append(J)
        if moved:
            prev_a = a
            continue
        if prev_a is not None and np.array_equal(a, prev_a):
            break
        if prev_J is not None and abs(prev_J - J) <= tol * J:
            break
        prev_a = a
    return a, C, trace, medoids


def _prepare(matrix, k, distance, max_iter, n_threads, seed):
    X = check_matrix(matrix)
    k = check_k(k, X.shape[0])
    kind = check_distance(distance)
    max_iter = check_positive_int(max_iter, "max_iter")
    seed = _resolve_seed(seed)
    return _Rows(X, kind, n_threads), k, max_iter, seed, np.random.default_rng(seed)


def _result(rows: _Rows, a, C, trace, seed, k, variant, medoids=None):
    inertia = float(np.sum(_point_distances(rows, a, C)))
    return ClusteringResult(
        assignments=np.asarray(a, dtype=np.int64),
        centroids=C,
        inertia=inertia,
        iterations_run=len(trace),
        inertia_trace=tuple(trace),
        seed=seed,
        k=k,
        distance=rows.kind,
        variant=variant,
        zero_rows=_zero_rows(rows.X),
        medoid_indices=None if medoids is None else tuple(int(m) for m in medoids),
    )


def kmeans_fit(matrix, k, distance="sql2", init="kpp", max_iter=DEFAULT_MAX_ITER,
               tol=DEFAULT_TOL, seed=0, n_threads=None) -> ClusteringResult:
    """One run of Lloyd's algorithm with mean updates.

    The mean update is applied whatever the distance; only under ``sql2`` is
    it the exact per-cluster minimizer (and the trace guaranteed monotone).
    Stops when assignments repeat, when the relative inertia change drops
    to ``tol`` or after ``max_iter`` iterations.
    """
    rows, k, max_iter, seed, rng = _prepare(matrix, k, distance, max_iter, n_threads, seed)
    C = rows.dense(init_rows(rows, k, init, rng))
    a, C, trace, _ = _lloyd(rows, k, C, _update_means, max_iter, tol)
    return _result(rows, a, C, trace, seed, k, "means")


def kmedian_fit(matrix, k, distance="sql2", init="kpp", max_iter=DEFAULT_MAX_ITER,
                tol=DEFAULT_TOL, seed=0, n_threads=None) -> ClusteringResult:
    """Lloyd iteration with coordinate-wise (lower) median updates."""
    rows, k, max_iter, seed, rng = _prepare(matrix, k, distance, max_iter, n_threads, seed)
    C = rows.dense(init_rows(rows, k, init, rng))
    a, C, trace, _ = _lloyd(rows, k, C, _update_medians, max_iter, tol)
    return _result(rows, a, C, trace, seed, k, "median")


def kmedoids_fit(matrix, k, distance="sql2", init="kpp", max_iter=DEFAULT_MAX_ITER,
                 tol=DEFAULT_TOL, seed=0, n_threads=None) -> ClusteringResult:
    """Alternate assignment and medoid update (the member with the least summed distance).

    Medoid costs are O(t) per cluster under ``sql2`` and under ``l1`` on
    binary rows; other distances cost O(t^2) pairwise evaluations.
    """
    rows, k, max_iter, seed, rng = _prepare(matrix, k, distance, max_iter, n_threads, seed)
    medoids = [int(i) for i in init_rows(rows, k, init, rng)]
    C = rows.dense(medoids)
    a, C, trace, medoids = _lloyd(rows, k, C, None, max_iter, tol, medoids=medoids)
    return _result(rows, a, C, trace, seed, k, "medoids", medoids=medoids)


def minibatch_kmeans_fit(matrix, k, distance="sql2", batch_size=100, n_batches=100, init="kpp",
                         seed=0, n_threads=None) -> ClusteringResult:
    """Mini-batch K-means with per-center learning rate 1/(points seen by the center).

    Each batch is a fresh sample of ``batch_size`` rows drawn without
    replacement. ``inertia_trace`` holds, per batch, the summed distance of
    the batch rows to their updated centroids; the final assignments and
    inertia come from one full assignment pass.
    """
    rows, k, _, seed, rng = _prepare(matrix, k, distance, 1, n_threads, seed)
    n = rows.n
    batch_size = check_positive_int(batch_size, "batch_size")
    if batch_size > n:
        raise ValueError(f"batch_size={batch_size} exceeds the number of rows ({n})")
    n_batches = check_positive_int(n_batches, "n_batches", minimum=0)

    C = rows.dense(init_rows(rows, k, init, rng))
    seen = np.zeros(k)
    trace = []
    for _ in range(n_batches):
        picked = np.sort(rng.choice(n, size=batch_size, replace=False))
        batch = _Rows(rows.X[picked], rows.kind, rows.n_threads)
        a, _ = _assign(batch, C)
        sums = batch.cluster_sums(a, k)
        hits = np.bincount(a, minlength=k).astype(np.float64)
        touched = hits > 0
        # per-point updates with rate 1/count compose to a running mean
        new_seen = seen + hits
        C[touched] = (seen[touched, None] * C[touched] + sums[touched]) / new_seen[touched, None]
        seen = new_seen
        trace.append(float(np.sum(_point_distances(batch, a, C))))

    a, _ = _assign(rows, C)
    return _result(rows, a, C, trace, seed, k, "minibatch")


VARIANTS = {
    "means": kmeans_fit,
    "medoids": kmedoids_fit,
    "median": kmedian_fit,
    "minibatch": minibatch_kmeans_fit,
}


def restart_seeds(seed, restarts: int) -> list[int]:
    """Independent per-restart seeds derived from one master seed."""
    restarts = check_positive_int(restarts, "restarts")
    ss = np.random.SeedSequence(_resolve_seed(seed))
    return [int(c.generate_state(1)[0]) for c in ss.spawn(restarts)]


def fit_best(matrix, k, variant="means", restarts=1, seed=0, **params) -> ClusteringResult:
    """Run ``restarts`` seeded fits of ``variant`` and keep the lowest inertia.

    With a single restart the master seed is used directly. Ties keep the
    earliest restart.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {sorted(VARIANTS)}, got {variant!r}")
    fit = VARIANTS[variant]
    X = check_matrix(matrix)
    seeds = [_resolve_seed(seed)] if restarts == 1 else restart_seeds(seed, restarts)
    best = None
    for s in seeds:
        res = fit(X, k, seed=s, **params)
        if best is None or res.inertia < best.inertia:
            best = res
    logger.debug("k=%d best inertia %.6g over %d restarts", k, best.inertia, len(seeds))
    return _with_seeds(best, tuple(seeds))


def _with_seeds(res: ClusteringResult, seeds: tuple) -> ClusteringResult:
    from dataclasses import replace

    return replace(res, restart_seeds=seeds)
