"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``.

Both modules must return bit-identical results for identical inputs, so
floating-point operations here follow the same order as the Cython code.
"""

import numpy as np

LEAF = -1


def forest_predict_one(feature, threshold, left, right, value, roots, x):
    """Mean leaf value over all trees for a single feature vector.

    Plain lists are much faster than arrays for this scalar walk; callers on
    the hot path should pass lists.
    """
    total = 0.0
    for root in roots:
        node = root
        while feature[node] != LEAF:
            if x[feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        total += value[node]
    return total / len(roots)


def forest_predict(feature, threshold, left, right, value, roots, X):
    """Row-wise mean leaf value; ``X`` is a 2-D float array."""
    X = np.asarray(X, dtype=np.float64)
    rows = np.arange(X.shape[0])
    total = np.zeros(X.shape[0])
    for root in roots:
        node = np.full(X.shape[0], root, dtype=np.int64)
        while True:
            f = feature[node]
            inner = f != LEAF
            if not inner.any():
                break
            go_left = X[rows[inner], f[inner]] <= threshold[node[inner]]
            node[inner] = np.where(go_left, left[node[inner]], right[node[inner]])
        total += value[node]
    return total / len(roots)


def random_rollout(cumulative, revenues, t0, w, p, uniforms):
    """Play periods t0..T under rand-p, mutating ``w``; returns collected revenue.

    ``uniforms`` supplies two draws per period: the event, then the accept coin.
    """
    T, width = cumulative.shape
    revenue = 0.0
    k = 0
    for t in range(t0 - 1, T):
        u = uniforms[k]
        row = cumulative[t]
        j = 0
        while j < width - 1 and row[j] <= u:
            j += 1
        if j > 0 and uniforms[k + 1] < p:
            w[j - 1] += 1
            revenue += revenues[j - 1]
        k += 2
    return revenue
