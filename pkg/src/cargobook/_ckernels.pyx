# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: forest traversal and random rollouts."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF LEAF = -1


cdef inline double _tree(const cnp.int32_t[:] feature, const double[:] threshold,
                         const cnp.int32_t[:] left, const cnp.int32_t[:] right,
                         const double[:] value, Py_ssize_t node, const double[:] x) nogil:
    while feature[node] != LEAF:
        if x[feature[node]] <= threshold[node]:
            node = left[node]
        else:
            node = right[node]
    return value[node]


def forest_predict_one(const cnp.int32_t[:] feature, const double[:] threshold,
                       const cnp.int32_t[:] left, const cnp.int32_t[:] right,
                       const double[:] value, const cnp.int32_t[:] roots,
                       const double[:] x):
    cdef double total = 0.0
    cdef Py_ssize_t t
    for t in range(roots.shape[0]):
        total += _tree(feature, threshold, left, right, value, roots[t], x)
    return total / roots.shape[0]


def forest_predict(const cnp.int32_t[:] feature, const double[:] threshold,
                   const cnp.int32_t[:] left, const cnp.int32_t[:] right,
                   const double[:] value, const cnp.int32_t[:] roots, X):
    cdef const double[:, :] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[:] ov = out
    cdef Py_ssize_t i, t
    cdef double total
    with nogil:
        for i in range(n):
            total = 0.0
            for t in range(roots.shape[0]):
                total += _tree(feature, threshold, left, right, value, roots[t], Xv[i])
            ov[i] = total / roots.shape[0]
    return out


def random_rollout(const double[:, :] cumulative, const double[:] revenues, int t0,
                   cnp.int64_t[:] w, double p, const double[:] uniforms):
    cdef Py_ssize_t T = cumulative.shape[0]
    cdef Py_ssize_t width = cumulative.shape[1]
    cdef Py_ssize_t t, j, k = 0
    cdef double u, revenue = 0.0
    for t in range(t0 - 1, T):
        u = uniforms[k]
        j = 0
        while j < width - 1 and cumulative[t, j] <= u:
            j += 1
        if j > 0 and uniforms[k + 1] < p:
            w[j - 1] += 1
            revenue += revenues[j - 1]
        k += 2
    return revenue
