"""Learned operational cost: forest-predicted routing cost plus exact outsourcing."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..features import extract, feature_names
from ..instance import InstanceSpec
from ..routing.cost import fleet_size
from .dataset import Dataset
from .forest import ForestModel, fit_forest


def train_forest(data: Dataset, tree_count: int = 100, seed: int = 0, n_jobs: int = 1) -> ForestModel:
    X, y = data.train
    if len(y) == 0:
        raise ValueError("training split is empty")
    model = fit_forest(X, y, tree_count=tree_count, seed=seed, layout=data.layout, n_jobs=n_jobs)
    model.provenance = {"dataset": dict(data.provenance), "tree_count": tree_count, "seed": seed}
    return model


def metrics(model: ForestModel, X, y) -> tuple[float, float]:
    """(MSE, MAE) of the forest against labels."""
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ValueError("empty evaluation split")
    err = model.predict(X) - y
    return float(np.mean(err**2)), float(np.mean(np.abs(err)))


def _check_layout(model: ForestModel, spec: InstanceSpec) -> None:
    if list(model.layout) != feature_names(spec.n):
        raise ValueError("model feature layout does not match the instance")


def predict_cost(model: ForestModel, w: Sequence[int], spec: InstanceSpec) -> float:
    """Surrogate Gamma: -(forest routing cost + C * outsourced vehicles); 0 for the empty state."""
    _check_layout(model, spec)
    K = fleet_size(w, spec)
    if K == 0:
        return 0.0
    return -(model.predict_one(extract(w, spec)) + spec.C * (K - spec.K0))


class SurrogateCost:
    """Memoized ``w -> predicted Gamma`` for one instance."""

    def __init__(self, model: ForestModel, spec: InstanceSpec):
        _check_layout(model, spec)
        self.model = model
        self.spec = spec
        self.cache: dict[tuple[int, ...], float] = {}

    def __call__(self, w) -> float:
        key = tuple(int(x) for x in w)
        val = self.cache.get(key)
        if val is None:
            K = fleet_size(key, self.spec)
            if K == 0:
                val = 0.0
            else:
                val = -(self.model.predict_one(extract(key, self.spec)) + self.spec.C * (K - self.spec.K0))
            self.cache[key] = val
        return val

    def prefill(self, states) -> None:
        """Cost many states with one batched forest pass."""
        todo = [tuple(int(x) for x in w) for w in states]
        todo = [w for w in dict.fromkeys(todo) if w not in self.cache]
        fleets = [fleet_size(w, self.spec) for w in todo]
        active = [w for w, K in zip(todo, fleets) if K]
        preds = {}
        if active:
            X = np.array([extract(w, self.spec) for w in active])
            preds = dict(zip(active, self.model.predict(X).tolist()))
        for w, K in zip(todo, fleets):
            self.cache[w] = 0.0 if K == 0 else -(preds[w] + self.spec.C * (K - self.spec.K0))
