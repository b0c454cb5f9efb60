"""Random forest of CART regression trees, stored as flat node arrays."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import kernels

MODEL_FORMAT = "cargobook-forest/1"
LEAF = -1


def grow_tree(X: np.ndarray, y: np.ndarray, sample: np.ndarray):
    """Fully grown variance-reduction tree on rows ``sample`` (duplicates allowed).

    Returns node arrays ``(feature, threshold, left, right, value)`` in
    depth-first pre-order with the root at index 0.
    """
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, sample)]
    while stack:
        node, idx = stack.pop()
        yn = y[idx]
        value[node] = float(yn.mean())
        k = idx.size
        if k < 2 or yn.max() == yn.min():
            continue
        split = _best_split(X[idx], yn)
        if split is None:
            continue
        f, thr = split
        mask = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        lnode, rnode = new_node(), new_node()
        left[node], right[node] = lnode, rnode
        # right pushed first so the left subtree is numbered first
        stack.append((rnode, idx[~mask]))
        stack.append((lnode, idx[mask]))
    return feature, threshold, left, right, value


def _best_split(Xn: np.ndarray, yn: np.ndarray):
    """Split maximizing SSE reduction; ties go to the lowest feature, then the lowest cut."""
    k, m = Xn.shape
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    csum = np.cumsum(ys, axis=0)
    total = csum[-1]
    nl = np.arange(1, k, dtype=np.float64)[:, None]
    sl = csum[:-1]
    # SSE = sum(y^2) - [sl^2/nl + sr^2/nr]; maximize the bracket
    score = sl * sl / nl + (total - sl) ** 2 / (k - nl)
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf)
    flat = int(np.argmax(score.T))
    f, pos = divmod(flat, k - 1)
    lo, hi = xs[pos, f], xs[pos + 1, f]
    thr = (lo + hi) / 2.0
    if not lo <= thr < hi:
        thr = lo
    return f, float(thr)


@dataclass
class ForestModel:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    roots: np.ndarray
    seed: int
    layout: list[str]
    provenance: dict = field(default_factory=dict)
    _lists: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.feature = np.ascontiguousarray(self.feature, dtype=np.int32)
        self.threshold = np.ascontiguousarray(self.threshold, dtype=np.float64)
        self.left = np.ascontiguousarray(self.left, dtype=np.int32)
        self.right = np.ascontiguousarray(self.right, dtype=np.int32)
        self.value = np.ascontiguousarray(self.value, dtype=np.float64)
        self.roots = np.ascontiguousarray(self.roots, dtype=np.int32)

    @property
    def tree_count(self) -> int:
        return int(self.roots.size)

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    def _arrays(self):
        return self.feature, self.threshold, self.left, self.right, self.value, self.roots

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != len(self.layout):
            raise ValueError(f"expected {len(self.layout)} features, got {X.shape[1]}")
        return kernels.forest_predict(*self._arrays(), X)

    def predict_one(self, x) -> float:
        if len(x) != len(self.layout):
            raise ValueError(f"expected {len(self.layout)} features, got {len(x)}")
        if kernels.BACKEND == "c":
            return kernels.forest_predict_one(*self._arrays(), np.asarray(x, dtype=np.float64))
        if self._lists is None:
            self._lists = tuple(a.tolist() for a in self._arrays())
        return kernels.forest_predict_one(*self._lists, list(map(float, x)))

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "seed": self.seed,
            "layout": list(self.layout),
            "provenance": self.provenance,
            "roots": self.roots.tolist(),
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ForestModel":
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {doc.get('format')!r}")
        return cls(
            feature=doc["feature"],
            threshold=doc["threshold"],
            left=doc["left"],
            right=doc["right"],
            value=doc["value"],
            roots=doc["roots"],
            seed=doc["seed"],
            layout=doc["layout"],
            provenance=doc.get("provenance", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path) -> "ForestModel":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"model file not found: {path}")
        return cls.from_dict(json.loads(path.read_text()))


def _grow_bootstrap(X, y, child_seed):
    rng = np.random.default_rng(child_seed)
    sample = rng.integers(0, X.shape[0], size=X.shape[0])
    return grow_tree(X, y, sample)


def fit_forest(X, y, tree_count: int = 100, seed: int = 0, layout=None, n_jobs: int = 1) -> ForestModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training data is empty")
    if y.shape != (X.shape[0],):
        raise ValueError("labels do not match rows")
    children = np.random.SeedSequence(seed).spawn(tree_count)
    if n_jobs == 1:
        trees = [_grow_bootstrap(X, y, c) for c in children]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(_grow_bootstrap, [X] * tree_count, [y] * tree_count, children))

    parts = [[] for _ in range(5)]
    roots = []
    offset = 0
    for tree in trees:
        f, thr, lft, rgt, val = tree
        roots.append(offset)
        parts[0].extend(f)
        parts[1].extend(thr)
        parts[2].extend(c + offset if c != LEAF else LEAF for c in lft)
        parts[3].extend(c + offset if c != LEAF else LEAF for c in rgt)
        parts[4].extend(val)
        offset += len(f)
    if layout is None:
        layout = [f"x{i}" for i in range(X.shape[1])]
    return ForestModel(*parts, roots=roots, seed=seed, layout=list(layout))
