# cython: language_level=3
"""Compiled kernels; same contracts and arithmetic order as ``_pykernels``."""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fabs, pow, NAN

cnp.import_array()


cdef double _distance(const double[:] a, const double[:] b, int code, double param) noexcept nogil:
    cdef Py_ssize_t k, n = a.shape[0]
    cdef double s = 0.0, d
    if code == 0:
        for k in range(n):
            d = a[k] - b[k]
            s += d * d
        return sqrt(s)
    if code == 1:
        for k in range(n):
            s += fabs(a[k] - b[k])
        return s
    if code == 2:
        for k in range(n):
            if a[k] != b[k]:
                return 1.0
        return 0.0
    if code == 3:
        if a[0] * b[0] >= 0.0:
            return 0.0
        return fabs(b[0] - a[0])
    # code == 4
    for k in range(n):
        s += fabs(a[k] - b[k])
    s -= param
    return s if s > 0.0 else 0.0


def pairwise(const double[:, ::1] A, const double[:, ::1] B, int code, double param):
    if code < 0 or code > 4:
        raise ValueError(f"unknown metric code {code}")
    cdef Py_ssize_t i, j, na = A.shape[0], nb = B.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(na):
            for j in range(nb):
                o[i, j] = _distance(A[i], B[j], code, param)
    return out


def pairwise_table(const long[::1] ia, const long[::1] ib, const double[:, ::1] table):
    cdef Py_ssize_t i, j, na = ia.shape[0], nb = ib.shape[0]
    out = np.empty((na, nb), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(na):
            for j in range(nb):
                o[i, j] = table[ia[i], ib[j]]
    return out


def recursive_tot(const double[::1] xs, int code):
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef double acc
    if n == 0:
        raise ValueError("empty multiset")
    if code < 0 or code > 4:
        raise ValueError(f"unknown fold code {code}")
    with nogil:
        if code == 0 or code == 4:
            acc = xs[0]
            for i in range(1, n):
                acc = acc + xs[i]
            if code == 0:
                acc = acc / n
        elif code == 1:
            acc = xs[0] * xs[0]
            for i in range(1, n):
                acc = acc + xs[i] * xs[i]
            acc = sqrt(acc / n)
        elif code == 2:
            acc = xs[0]
            for i in range(1, n):
                if xs[i] > acc:
                    acc = xs[i]
        else:
            acc = xs[0]
            for i in range(1, n):
                acc = acc * xs[i]
            acc = pow(acc, 1.0 / n)
    return acc


def within_pairwise(const double[:, ::1] X, const long[::1] labels):
    cdef Py_ssize_t i, j, k, m = X.shape[0], dim = X.shape[1]
    cdef double total = 0.0, s, d
    with nogil:
        for i in range(m):
            for j in range(m):
                if labels[i] != labels[j] or i == j:
                    continue
                s = 0.0
                for k in range(dim):
                    d = X[i, k] - X[j, k]
                    s += d * d
                total += s
    return 0.5 * total


def within_centroid(const double[:, ::1] X, const long[::1] labels, Py_ssize_t K):
    cdef Py_ssize_t i, k, c, m = X.shape[0], dim = X.shape[1]
    sums_arr = np.zeros((K, dim), dtype=np.float64)
    counts_arr = np.zeros(K, dtype=np.int64)
    sse_arr = np.zeros(K, dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    cdef long long[::1] counts = counts_arr
    cdef double[::1] sse = sse_arr
    cdef double s, d, total = 0.0
    with nogil:
        for i in range(m):
            c = labels[i]
            counts[c] += 1
            for k in range(dim):
                sums[c, k] += X[i, k]
        for c in range(K):
            for k in range(dim):
                if counts[c]:
                    sums[c, k] = sums[c, k] / counts[c]
                else:
                    sums[c, k] = 0.0
        for i in range(m):
            c = labels[i]
            s = 0.0
            for k in range(dim):
                d = X[i, k] - sums[c, k]
                s += d * d
            sse[c] += s
        for c in range(K):
            total += counts[c] * sse[c]
    return total


def linkage_matrix(const double[:, ::1] D, const long[::1] labels, Py_ssize_t K, int code):
    cdef Py_ssize_t m = labels.shape[0]
    cdef Py_ssize_t i, j, a, b, p, q
    order_arr = np.argsort(np.asarray(labels), kind="stable").astype(np.int64)
    counts_arr = np.bincount(np.asarray(labels), minlength=K).astype(np.int64)
    starts_arr = np.zeros(K + 1, dtype=np.int64)
    starts_arr[1:] = np.cumsum(counts_arr)
    cdef long long[::1] order = order_arr
    cdef long long[::1] starts = starts_arr
    out = np.full((K, K), np.nan)
    cdef double[:, ::1] o = out
    cdef double acc, v
    cdef bint first
    with nogil:
        for i in range(K):
            if starts[i + 1] == starts[i]:
                continue
            for j in range(i + 1, K):
                if starts[j + 1] == starts[j]:
                    continue
                acc = D[order[starts[i]], order[starts[j]]]
                first = True
                for p in range(starts[i], starts[i + 1]):
                    a = order[p]
                    for q in range(starts[j], starts[j + 1]):
                        b = order[q]
                        v = D[a, b]
                        if first:
                            first = False
                            continue
                        if code == 0:
                            if v < acc:
                                acc = v
                        elif code == 1:
                            acc = acc + v
                        else:
                            if v > acc:
                                acc = v
                if code == 1:
                    acc = acc / ((starts[i + 1] - starts[i]) * (starts[j + 1] - starts[j]))
                o[i, j] = acc
    return out
