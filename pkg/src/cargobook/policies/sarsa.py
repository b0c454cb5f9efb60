"""On-policy SARSA with a neural Q-function over (period, state, request, action)."""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path
from typing import Callable

import numpy as np

from ..instance import InstanceSpec, arrival_table
from ..simulator import NO_REQUEST, sample_events
from .base import POLICY_FORMAT, Policy
from .mlp import QNetwork

log = logging.getLogger(__name__)

# hidden width and learning rate per instance family
NETWORK_CONFIG = {4: (128, 1e-3), 10: (256, 1e-3), 15: (256, 1e-3), 50: (1024, 1e-5)}


class TrainingDiverged(RuntimeError):
    pass


def encoding_dim(n: int) -> int:
    return 2 * n + 2


def encode_pair(t: int, w, j: int, spec: InstanceSpec) -> np.ndarray:
    """Two rows (reject, accept) encoding period, state and the pending request."""
    n, T = spec.n, spec.T
    x = np.zeros((2, 2 * n + 2))
    x[:, 0] = t / T
    x[:, 1 : n + 1] = np.asarray(w, dtype=np.float64) / T
    x[:, n + j] = 1.0
    x[1, -1] = 1.0
    return x


def value_scale(spec: InstanceSpec) -> float:
    """Targets are divided by this so network outputs stay O(1)."""
    scale = max(spec.revenues) * spec.T / 10.0
    return scale if scale > 0 else 1.0


class SarsaPolicy(Policy):
    kind = "sarsa"

    def __init__(self, net: QNetwork, spec: InstanceSpec, scale: float | None = None):
        super().__init__()
        self.net = net
        self.spec = spec
        self.scale = value_scale(spec) if scale is None else scale

    def q_values(self, t, w, j) -> np.ndarray:
        return self.net.forward(encode_pair(t, w, j, self.spec)) * self.scale

    def decide(self, state, j):
        q = self.net.forward(encode_pair(state.t, state.w, j, self.spec))
        return bool(q[1] > q[0])

    def describe(self):
        return {"kind": self.kind, "hidden_dim": self.net.hidden_dim, "lr": self.net.lr}

    def save(self, path) -> None:
        doc = {
            "format": POLICY_FORMAT,
            "kind": self.kind,
            "instance": self.spec.digest(),
            "scale": self.scale,
            "provenance": self.provenance,
            "network": self.net.to_dict(),
        }
        Path(path).write_text(json.dumps(doc) + "\n")

    @classmethod
    def load(cls, path, spec: InstanceSpec) -> "SarsaPolicy":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"SARSA policy file not found: {path}")
        doc = json.loads(path.read_text())
        if doc.get("format") != POLICY_FORMAT or doc.get("kind") != cls.kind:
            raise ValueError(f"{path} is not a SARSA policy")
        if doc["instance"] != spec.digest():
            raise ValueError(f"{path} belongs to instance {doc['instance']}")
        policy = cls(QNetwork.from_dict(doc["network"]), spec, doc["scale"])
        policy.provenance = doc.get("provenance", {})
        return policy


def greedy_profits(net: QNetwork, spec: InstanceSpec, realizations, terminal: Callable) -> np.ndarray:
    """Profit (revenue + terminal cost) of the greedy policy on each realization, batched per period."""
    events = np.asarray(realizations, dtype=np.int64)
    R, n, T = events.shape[0], spec.n, spec.T
    w = np.zeros((R, n))
    revenue = np.zeros(R)
    rev = np.asarray(spec.revenues)
    for t in range(1, T + 1):
        ev = events[:, t - 1]
        rows = np.flatnonzero(ev != NO_REQUEST)
        if rows.size == 0:
            continue
        k = rows.size
        x = np.zeros((2 * k, 2 * n + 2))
        x[:, 0] = t / T
        x[0::2, 1 : n + 1] = w[rows] / T
        x[1::2, 1 : n + 1] = w[rows] / T
        x[np.arange(2 * k), n + np.repeat(ev[rows], 2)] = 1.0
        x[1::2, -1] = 1.0
        q = net.forward(x)
        accept = q[1::2] > q[0::2]
        acc_rows = rows[accept]
        acc_loc = ev[acc_rows] - 1
        w[acc_rows, acc_loc] += 1
        revenue[acc_rows] += rev[acc_loc]
    return np.array([revenue[i] + terminal(tuple(int(v) for v in w[i])) for i in range(R)])


def sarsa_train(
    spec: InstanceSpec,
    terminal: Callable,
    episodes: int = 25_000,
    epsilon: float = 0.10,
    hidden_dim: int | None = None,
    lr: float | None = None,
    eval_every: int = 100,
    validation=None,
    validation_count: int = 50,
    seed: int = 0,
    history: list | None = None,
) -> SarsaPolicy:
    """Train SARSA against ``terminal(w)``; returns the best checkpoint on validation profit."""
    if hidden_dim is None or lr is None:
        default_h, default_lr = NETWORK_CONFIG.get(spec.family, (128, 1e-3))
        hidden_dim = hidden_dim or default_h
        lr = lr or default_lr
    start = time.perf_counter()
    seeds = np.random.SeedSequence(seed).spawn(3)
    net_rng, ep_rng, val_rng = (np.random.default_rng(s) for s in seeds)
    table = arrival_table(spec)
    if validation is None:
        validation = [sample_events(table, val_rng) for _ in range(validation_count)]
    net = QNetwork(encoding_dim(spec.n), hidden_dim, lr, net_rng)
    scale = value_scale(spec)
    revenues = spec.revenues

    best_net, best_profit, best_episode = net.copy(), -np.inf, 0
    for ep in range(1, episodes + 1):
        events = sample_events(table, ep_rng)
        explore = ep_rng.random(spec.T)
        coins = ep_rng.integers(0, 2, size=spec.T)
        w = [0] * spec.n
        prev_x, prev_r = None, 0.0
        for t, ev in enumerate(events, start=1):
            if ev == NO_REQUEST:
                continue
            x = encode_pair(t, w, ev, spec)
            q = net.forward(x)
            if explore[t - 1] < epsilon:
                a = int(coins[t - 1])
            else:
                a = int(q[1] > q[0])
            if prev_x is not None:
                _update(net, prev_x, prev_r / scale + q[a], ep)
            prev_x, prev_r = x[a], 0.0
            if a:
                w[ev - 1] += 1
                prev_r = revenues[ev - 1]
        if prev_x is not None:
            _update(net, prev_x, (prev_r + terminal(tuple(w))) / scale, ep)

        if ep % eval_every == 0:
            profit = float(np.mean(greedy_profits(net, spec, validation, terminal)))
            if not np.isfinite(profit):
                raise TrainingDiverged(f"non-finite validation profit at episode {ep}")
            if history is not None:
                history.append((ep, profit))
            if profit > best_profit:
                best_net, best_profit, best_episode = net.copy(), profit, ep
            log.debug("episode %d validation profit %.3f", ep, profit)

    if best_profit == -np.inf:
        best_profit = float(np.mean(greedy_profits(net, spec, validation, terminal)))
        best_net, best_episode = net.copy(), episodes
    policy = SarsaPolicy(best_net, spec, scale)
    policy.offline_seconds = time.perf_counter() - start
    policy.provenance = {
        "instance": spec.digest(),
        "seed": seed,
        "episodes": episodes,
        "epsilon": epsilon,
        "hidden_dim": hidden_dim,
        "lr": lr,
        "best_episode": best_episode,
        "best_validation_profit": best_profit,
    }
    return policy


def _update(net: QNetwork, x, target: float, episode: int) -> None:
    if not np.isfinite(target):
        raise TrainingDiverged(f"non-finite target {target} at episode {episode}")
    loss = net.train_step(x, target)
    if not np.isfinite(loss):
        raise TrainingDiverged(f"non-finite loss {loss} at episode {episode} (target {target})")
