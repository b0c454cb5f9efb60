"""Exact one-dimensional bin packing for fleet sizing."""

from __future__ import annotations

import math
from typing import Sequence


def split_demands(w: Sequence[int], Q: int) -> list[tuple[int, int]]:
    """Break each location's demand into (location, size) items no larger than Q.

    A demand ``d`` becomes ``d // Q`` full items plus one item of ``d % Q``
    when that remainder is nonzero.
    """
    items = []
    for j, d in enumerate(w):
        if d < 0:
            raise ValueError(f"negative demand {d} at location {j}")
        full, rest = divmod(int(d), Q)
        items.extend([(j, Q)] * full)
        if rest:
            items.append((j, rest))
    return items


def first_fit_decreasing(items: Sequence[int], Q: int) -> list[list[int]]:
    bins: list[list[int]] = []
    loads: list[int] = []
    for size in sorted(items, reverse=True):
        for b, load in enumerate(loads):
            if load + size <= Q:
                bins[b].append(size)
                loads[b] += size
                break
        else:
            bins.append([size])
            loads.append(size)
    return bins


def lower_bound_l2(items: Sequence[int], Q: int) -> int:
    """Martello-Toth L2 bound (dominates the continuous bound)."""
    if not items:
        return 0
    best = math.ceil(sum(items) / Q)
    for k in range(0, Q // 2 + 1):
        big = [s for s in items if s > Q - k]
        mid = [s for s in items if Q - k >= s > Q / 2]
        small_sum = sum(s for s in items if Q / 2 >= s >= k)
        spare = len(mid) * Q - sum(mid)
        extra = max(0, math.ceil((small_sum - spare) / Q))
        best = max(best, len(big) + len(mid) + extra)
    return best


def min_bins(items: Sequence[int], Q: int) -> int:
    """Minimum number of capacity-Q bins holding every item (sizes in 1..Q)."""
    if any(s < 1 or s > Q for s in items):
        raise ValueError(f"item sizes must lie in 1..{Q}")
    items = sorted(items, reverse=True)
    if not items:
        return 0
    lb = lower_bound_l2(items, Q)
    ub = len(first_fit_decreasing(items, Q))
    if lb == ub:
        return ub

    suffix = [0] * (len(items) + 1)
    for i in range(len(items) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + items[i]
    best = ub
    loads: list[int] = []

    def dfs(i: int) -> bool:
        nonlocal best
        if i == len(items):
            best = len(loads)
            return best == lb
        free = sum(Q - load for load in loads)
        if len(loads) + max(0, math.ceil((suffix[i] - free) / Q)) >= best:
            return False
        size = items[i]
        tried = set()
        for b in range(len(loads)):
            load = loads[b]
            if load + size > Q or load in tried:
                continue
            tried.add(load)
            loads[b] += size
            done = dfs(i + 1)
            loads[b] -= size
            if done:
                return True
        if len(loads) + 1 < best:
            loads.append(size)
            done = dfs(i + 1)
            loads.pop()
            if done:
                return True
        return False

    dfs(0)
    return best


def min_vehicles(w: Sequence[int], Q: int) -> int:
    if Q < 1:
        raise ValueError("capacity must be >= 1")
    return min_bins([size for _, size in split_demands(w, Q)], Q)


def pack_items(items: Sequence[int], Q: int, nbins: int) -> list[list[int]] | None:
    """Assign item indices to at most ``nbins`` bins, or ``None`` if impossible."""
    order = sorted(range(len(items)), key=lambda i: (-items[i], i))
    bins: list[list[int]] = []
    loads: list[int] = []

    def dfs(k: int) -> bool:
        if k == len(order):
            return True
        i = order[k]
        size = items[i]
        tried = set()
        for b in range(len(loads)):
            if loads[b] + size > Q or loads[b] in tried:
                continue
            tried.add(loads[b])
            loads[b] += size
            bins[b].append(i)
            if dfs(k + 1):
                return True
            loads[b] -= size
            bins[b].pop()
        if len(loads) < nbins:
            loads.append(size)
            bins.append([i])
            if dfs(k + 1):
                return True
            loads.pop()
            bins.pop()
        return False

    return bins if dfs(0) else None
