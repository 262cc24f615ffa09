"""Sparse-row against dense-centroid distance kernels.

Every kernel is computed block by block over rows. A row's distances depend
only on that row, so results are identical for any block split or thread
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy.sparse as sp

from .._threads import resolve_threads

BLOCK_ROWS = 4096


class _CentroidCache:
    """Per-centroid quantities reused across row blocks."""

    def __init__(self, C: np.ndarray):
        self.C = C
        self.CT = np.ascontiguousarray(C.T)
        self.sq = np.einsum("ij,ij->i", C, C)
        self.norm = np.sqrt(self.sq)
        self.abs_sum = np.abs(C).sum(axis=1)


def row_ids(X: sp.csr_matrix) -> np.ndarray:
    """Row index of every stored entry."""
    return np.repeat(np.arange(X.shape[0]), np.diff(X.indptr))


def row_sq_norms(X: sp.csr_matrix) -> np.ndarray:
    return np.bincount(row_ids(X), weights=X.data * X.data, minlength=X.shape[0])


def _block(X: sp.csr_matrix, cache: _CentroidCache, kind: str, sqx=None) -> np.ndarray:
    n, k = X.shape[0], cache.C.shape[0]
    if kind == "l1":
        # |x - c|_1 = sum|c| + sum over nonzeros of (|x_j - c_j| - |c_j|)
        rows = row_ids(X)
        D = np.empty((n, k))
        for c in range(k):
            cj = cache.C[c, X.indices]
            corr = np.abs(X.data - cj) - np.abs(cj)
            D[:, c] = cache.abs_sum[c] + np.bincount(rows, weights=corr, minlength=n)
        return np.maximum(D, 0.0)

    dots = np.asarray(X @ cache.CT)
    if sqx is None:
        sqx = row_sq_norms(X)
    if kind in ("sql2", "l2"):
        D = sqx[:, None] + cache.sq[None, :] - 2.0 * dots
        np.maximum(D, 0.0, out=D)
        return np.sqrt(D) if kind == "l2" else D
    if kind == "cosine":
        denom = np.sqrt(sqx)[:, None] * cache.norm[None, :]
        D = np.ones((n, k))
        ok = denom > 0
        D[ok] = 1.0 - dots[ok] / denom[ok]
        return np.clip(D, 0.0, 2.0)
    raise ValueError(f"unknown distance {kind!r}")


def pairwise(X: sp.csr_matrix, C: np.ndarray, kind: str, n_threads=None, sqx=None) -> np.ndarray:
    """Distance from every row of ``X`` to every row of ``C``; shape (n, k).

    ``sqx`` optionally supplies precomputed squared row norms.
    """
    cache = _CentroidCache(np.asarray(C, dtype=np.float64))
    n = X.shape[0]
    if sqx is None and kind != "l1":
        sqx = row_sq_norms(X)
    if n <= BLOCK_ROWS:
        return _block(X, cache, kind, sqx)
    starts = range(0, n, BLOCK_ROWS)
    work = lambda s: _block(X[s:s + BLOCK_ROWS], cache, kind,  # noqa: E731
                            None if sqx is None else sqx[s:s + BLOCK_ROWS])
    n_threads = resolve_threads(n_threads)
    if n_threads == 1:
        parts = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(work, starts))
    return np.vstack(parts)


def dense_distance(a: np.ndarray, b: np.ndarray, kind: str) -> float:
    """Reference distance between two dense vectors (for checks and oracles)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    diff = a - b
    if kind == "sql2":
        return float(diff @ diff)
    if kind == "l2":
        return float(np.sqrt(diff @ diff))
    if kind == "l1":
        return float(np.abs(diff).sum())
    if kind == "cosine":
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0 or nb == 0:
            return 1.0
        return float(1.0 - (a @ b) / (na * nb))
    raise ValueError(f"unknown distance {kind!r}")
