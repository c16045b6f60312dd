"""Pure numpy LOF kernel, used when the compiled extension is unavailable.

Mirrors ``_lof_core`` operation for operation so both backends agree on
neighborhood ties.
"""

import numpy as np


def pairwise_distances(X):
    n, d = X.shape
    acc = np.zeros((n, n))
    for t in range(d):
        diff = X[:, None, t] - X[None, :, t]
        acc += diff * diff
    D = np.sqrt(acc)
    np.fill_diagonal(D, 0.0)
    return D


def knn_core(D, k):
    n = D.shape[0]
    off = ~np.eye(n, dtype=bool)
    others = D[off].reshape(n, n - 1)
    kdist = np.partition(others, k - 1, axis=1)[:, k - 1]
    member = (D <= kdist[:, None]) & off
    counts = member.sum(axis=1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    # np.nonzero walks row-major, so indices come out ascending per row
    indices = np.nonzero(member)[1].astype(np.int64)
    return kdist, indptr, indices


def lof_core(D, kdist, indptr, indices):
    n = D.shape[0]
    rows = np.repeat(np.arange(n), np.diff(indptr))
    reach = np.maximum(kdist[indices], D[rows, indices])
    sums = np.add.reduceat(reach, indptr[:-1])
    sizes = np.diff(indptr)
    with np.errstate(divide="ignore"):
        lrd = np.where(sums == 0.0, np.inf, sizes / np.where(sums == 0.0, 1.0, sums))
    finite = lrd[np.isfinite(lrd)]
    cap = finite.max() if finite.size and finite.max() > 0 else 1.0
    neigh = lrd[indices]
    neigh = np.where(np.isinf(neigh), cap, neigh)
    safe = np.where(np.isinf(lrd), 1.0, lrd)
    ratios = neigh / safe[rows]
    lof = np.add.reduceat(ratios, indptr[:-1]) / sizes
    lof[np.isinf(lrd)] = 1.0
    return lrd, lof
