"""Fixed-length feature vector of a terminal booking state."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .instance import InstanceSpec

STAT_NAMES = ("min", "max", "mean", "median", "std", "q1", "q3")


def feature_names(n: int) -> list[str]:
    names = ["Q", "depot_x", "depot_y"]
    names += [f"w{j + 1}" for j in range(n)]
    names += [f"depot_{s}" for s in STAT_NAMES]
    names += [f"pair_{s}" for s in STAT_NAMES]
    return names


def feature_length(n: int) -> int:
    return n + 3 + 2 * len(STAT_NAMES)


def summary_stats(values: np.ndarray) -> np.ndarray:
    """(min, max, mean, median, std, Q1, Q3); all zeros for an empty sample."""
    if values.size == 0:
        return np.zeros(len(STAT_NAMES))
    q1, med, q3 = np.percentile(values, [25, 50, 75])
    return np.array([values.min(), values.max(), values.mean(), med, values.std(), q1, q3])


def extract(w: Sequence[int], spec: InstanceSpec) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (spec.n,):
        raise ValueError(f"state has shape {w.shape}, expected ({spec.n},)")
    active = np.flatnonzero(w > 0) + 1
    D = spec.distances
    depot_d = D[0, active]
    if active.size > 1:
        sub = D[np.ix_(active, active)]
        pair_d = sub[np.triu_indices(active.size, k=1)]
    else:
        pair_d = np.empty(0)
    return np.concatenate(
        [
            [float(spec.Q), spec.depot[0], spec.depot[1]],
            w,
            summary_stats(depot_d),
            summary_stats(pair_d),
        ]
    )
