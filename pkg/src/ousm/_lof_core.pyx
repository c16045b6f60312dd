# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled LOF kernel: exhaustive k-NN with tie inclusion, reachability, lrd and LOF."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


def pairwise_distances(double[:, ::1] X):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double acc, diff
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] D = out
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for t in range(d):
                diff = X[i, t] - X[j, t]
                acc = acc + diff * diff
            D[i, j] = sqrt(acc)
            D[j, i] = D[i, j]
    return out


cdef double _select(double[::1] a, Py_ssize_t n, Py_ssize_t kth) noexcept nogil:
    # Hoare quickselect; a is scratch and gets reordered.
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j
    cdef double pivot, tmp
    while lo < hi:
        pivot = a[(lo + hi) // 2]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                tmp = a[i]
                a[i] = a[j]
                a[j] = tmp
                i += 1
                j -= 1
        if kth <= j:
            hi = j
        elif kth >= i:
            lo = i
        else:
            break
    return a[kth]


def knn_core(double[:, ::1] D, int k):
    """k-distance and tie-inclusive neighborhoods from a distance matrix.

    Neighborhoods are returned in CSR form with indices ascending.
    """
    cdef Py_ssize_t n = D.shape[0]
    cdef Py_ssize_t i, j, m, cnt
    kd_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] kdist = kd_arr
    row = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] rowv = row
    counts = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] indptr = counts
    for i in range(n):
        m = 0
        for j in range(n):
            if j != i:
                rowv[m] = D[i, j]
                m += 1
        kdist[i] = _select(rowv, n - 1, k - 1)
        cnt = 0
        for j in range(n):
            if j != i and D[i, j] <= kdist[i]:
                cnt += 1
        indptr[i + 1] = indptr[i] + cnt
    idx_arr = np.empty(indptr[n], dtype=np.int64)
    cdef cnp.int64_t[::1] indices = idx_arr
    for i in range(n):
        m = indptr[i]
        for j in range(n):
            if j != i and D[i, j] <= kdist[i]:
                indices[m] = j
                m += 1
    return kd_arr, counts, idx_arr


def lof_core(double[:, ::1] D, double[::1] kdist,
             cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    """Return (lrd, lof); lrd is +inf where every reach-distance is zero."""
    cdef Py_ssize_t n = D.shape[0]
    cdef Py_ssize_t i, m, o
    cdef double s, r, cap, ratio
    lrd_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lrd = lrd_arr
    for i in range(n):
        s = 0.0
        for m in range(indptr[i], indptr[i + 1]):
            o = indices[m]
            r = D[i, o]
            if kdist[o] > r:
                r = kdist[o]
            s = s + r
        if s == 0.0:
            lrd[i] = INFINITY
        else:
            lrd[i] = (indptr[i + 1] - indptr[i]) / s
    cap = 0.0
    for i in range(n):
        if lrd[i] != INFINITY and lrd[i] > cap:
            cap = lrd[i]
    if cap == 0.0:
        cap = 1.0
    lof_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lof = lof_arr
    for i in range(n):
        if lrd[i] == INFINITY:
            lof[i] = 1.0
            continue
        s = 0.0
        for m in range(indptr[i], indptr[i + 1]):
            o = indices[m]
            ratio = lrd[o]
            if ratio == INFINITY:
                ratio = cap
            s = s + ratio / lrd[i]
        lof[i] = s / (indptr[i + 1] - indptr[i])
    return lrd_arr, lof_arr
