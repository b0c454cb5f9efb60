"""Slow, obviously-correct reference implementations used only by the tests.

None of these import the code under test beyond plain data containers.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


# bin packing: DP over item-count vectors


def bin_patterns(Q):
    """Every nonzero count vector (c_1..c_Q) whose total size fits in one bin."""
    out = []

    def rec(size, left, acc):
        if size > Q:
            if any(acc):
                out.append(tuple(acc))
            return
        for c in range(left // size + 1):
            rec(size + 1, left - c * size, acc + [c])

    rec(1, Q, [])
    return out


@lru_cache(maxsize=None)
def pattern_min_bins(Q):
    """Return f(counts) = fewest bins for counts[s-1] items of size s, memoized across calls."""
    patterns = bin_patterns(Q)

    @lru_cache(maxsize=None)
    def f(counts):
        if not any(counts):
            return 0
        best = math.inf
        for p in patterns:
            if all(a <= b for a, b in zip(p, counts)):
                best = min(best, 1 + f(tuple(b - a for a, b in zip(p, counts))))
        return best

    return f


def brute_min_bins(sizes, Q):
    counts = [0] * Q
    for s in sizes:
        counts[s - 1] += 1
    return pattern_min_bins(Q)(tuple(counts))


def split_items(w, Q):
    items = []
    for d in w:
        items += [Q] * (d // Q)
        if d % Q:
            items.append(d % Q)
    return items


# CVRP: enumerate every ordering and every way to cut it into routes


def _dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def brute_cvrp(points, demands, depot, Q, K):
    """Optimal CVRP cost by enumerating permutations and route cut points."""
    m = len(points)
    if m == 0:
        return 0.0
    best = math.inf
    for perm in itertools.permutations(range(m)):
        # each of the m-1 gaps is either a route break or not
        for mask in range(1 << (m - 1)):
            routes, cur = [], [perm[0]]
            for g in range(m - 1):
                if mask >> g & 1:
                    routes.append(cur)
                    cur = []
                cur.append(perm[g + 1])
            routes.append(cur)
            if len(routes) > K:
                continue
            if any(sum(demands[i] for i in r) > Q for r in routes):
                continue
            cost = 0.0
            for r in routes:
                pts = [depot] + [points[i] for i in r] + [depot]
                cost += sum(_dist(pts[k], pts[k + 1]) for k in range(len(pts) - 1))
            best = min(best, cost)
    return best


# booking MDP: expectimax over every event sequence


def expectimax_value(probs, revenues, T, terminal, n):
    """V_1(0) by recursing over all event histories without any state sharing."""

    def go(t, w):
        if t > T:
            return terminal(w)
        row = probs[t - 1]
        total = row[0] * go(t + 1, w)
        for j in range(n):
            if row[j + 1] == 0:
                continue
            stay = go(t + 1, w)
            up = list(w)
            up[j] += 1
            total += row[j + 1] * max(revenues[j] + go(t + 1, tuple(up)), stay)
        return total

    return go(1, (0,) * n)


def expectimax_decision(probs, revenues, T, terminal, n, t, w, j):
    """Accept iff immediate revenue plus the expectimax continuation beats rejecting."""

    def go(s, x):
        if s > T:
            return terminal(x)
        row = probs[s - 1]
        total = row[0] * go(s + 1, x)
        for k in range(n):
            if row[k + 1] == 0:
                continue
            up = list(x)
            up[k] += 1
            total += row[k + 1] * max(revenues[k] + go(s + 1, tuple(up)), go(s + 1, x))
        return total

    up = list(w)
    up[j - 1] += 1
    return revenues[j - 1] + go(t + 1, tuple(up)) > go(t + 1, tuple(w))


def bellman_rhs(probs_row, revenues, next_layer, w):
    """Right-hand side of the backward recursion, written out plainly."""
    n = len(w)
    stay = next_layer[tuple(w)]
    val = probs_row[0] * stay
    for j in range(n):
        up = list(w)
        up[j] += 1
        val += probs_row[j + 1] * max(revenues[j] + next_layer[tuple(up)], stay)
    return val


# MLP: central finite differences


def numeric_grads(net, x, target, h=1e-6):
    grads = []
    for p in net.params:
        g = np.zeros_like(p, dtype=np.float64)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = (net.forward(x) - target) ** 2
            flat[i] = orig - h
            down = (net.forward(x) - target) ** 2
            flat[i] = orig
            gflat[i] = (up - down) / (2 * h)
        grads.append(g)
    return grads


# features: straightforward statistics


def plain_stats(values):
    if len(values) == 0:
        return [0.0] * 7
    v = sorted(values)

    def pct(q):
        pos = q * (len(v) - 1)
        lo = math.floor(pos)
        hi = min(lo + 1, len(v) - 1)
        return v[lo] + (v[hi] - v[lo]) * (pos - lo)

    mean = sum(v) / len(v)
    std = math.sqrt(sum((x - mean) ** 2 for x in v) / len(v))
    return [v[0], v[-1], mean, pct(0.5), std, pct(0.25), pct(0.75)]


# regression trees: exhaustive split scan


def brute_best_sse(X, y):
    """Smallest child SSE over every feature and every distinct cut."""
    best = math.inf
    for f in range(X.shape[1]):
        for cut in np.unique(X[:, f])[:-1]:
            mask = X[:, f] <= cut
            sse = ((y[mask] - y[mask].mean()) ** 2).sum() + ((y[~mask] - y[~mask].mean()) ** 2).sum()
            best = min(best, sse)
    return best
