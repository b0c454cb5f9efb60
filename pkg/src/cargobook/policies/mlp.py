"""One-hidden-layer perceptron with Adam, used as the SARSA Q-function."""

from __future__ import annotations

import numpy as np


class QNetwork:
    """Scalar regressor: linear -> ReLU -> linear."""

    def __init__(self, input_dim: int, hidden_dim: int, lr: float = 1e-3,
                 rng: np.random.Generator | None = None,
                 betas=(0.9, 0.999), eps: float = 1e-8):
        rng = rng if rng is not None else np.random.default_rng(0)
        b1 = 1.0 / np.sqrt(input_dim)
        b2 = 1.0 / np.sqrt(hidden_dim)
        self.W1 = rng.uniform(-b1, b1, size=(hidden_dim, input_dim))
        self.b1 = rng.uniform(-b1, b1, size=hidden_dim)
        self.w2 = rng.uniform(-b2, b2, size=hidden_dim)
        self.b2 = np.array(rng.uniform(-b2, b2))
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.steps = 0
        self._m = [np.zeros_like(p) for p in self.params]
        self._v = [np.zeros_like(p) for p in self.params]

    @property
    def params(self) -> list[np.ndarray]:
        return [self.W1, self.b1, self.w2, self.b2]

    @property
    def input_dim(self) -> int:
        return self.W1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.W1.shape[0]

    def forward(self, x) -> np.ndarray | float:
        """Q-value for one input vector (returns float) or a batch of rows (returns array)."""
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite network input")
        h = np.maximum(self.W1 @ x.T + self.b1[:, None] if x.ndim == 2 else self.W1 @ x + self.b1, 0.0)
        out = self.w2 @ h + self.b2
        return float(out) if x.ndim == 1 else out

    def loss_and_grads(self, x, target: float):
        """Squared error (q - target)^2 and its gradient for every parameter."""
        x = np.asarray(x, dtype=np.float64)
        pre = self.W1 @ x + self.b1
        h = np.maximum(pre, 0.0)
        q = float(self.w2 @ h + self.b2)
        diff = q - target
        dq = 2.0 * diff
        dh = dq * self.w2 * (pre > 0)
        grads = [np.outer(dh, x), dh, dq * h, np.array(dq)]
        return diff * diff, grads

    def train_step(self, x, target: float) -> float:
        """One Adam update on a single example; returns the loss before the update."""
        if not np.isfinite(target):
            raise ValueError(f"non-finite training target {target}")
        loss, grads = self.loss_and_grads(x, target)
        self.steps += 1
        b1, b2 = self.betas
        c1 = 1.0 - b1**self.steps
        c2 = 1.0 - b2**self.steps
        for p, g, m, v in zip(self.params, grads, self._m, self._v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
        return loss

    def copy(self) -> "QNetwork":
        clone = QNetwork.__new__(QNetwork)
        clone.__dict__.update(self.__dict__)
        clone.W1, clone.b1, clone.w2, clone.b2 = (p.copy() for p in self.params)
        clone._m = [a.copy() for a in self._m]
        clone._v = [a.copy() for a in self._v]
        return clone

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden_dim": self.hidden_dim,
            "lr": self.lr,
            "W1": self.W1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": float(self.b2),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "QNetwork":
        net = cls(doc["input_dim"], doc["hidden_dim"], doc["lr"])
        net.W1 = np.array(doc["W1"], dtype=np.float64)
        net.b1 = np.array(doc["b1"], dtype=np.float64)
        net.w2 = np.array(doc["w2"], dtype=np.float64)
        net.b2 = np.array(doc["b2"], dtype=np.float64)
        net._m = [np.zeros_like(p) for p in net.params]
        net._v = [np.zeros_like(p) for p in net.params]
        return net


def mlp_forward(net: QNetwork, x):
    return net.forward(x)


def mlp_train_step(net: QNetwork, x, target: float):
    loss = net.train_step(x, target)
    return net, loss
