"""Monte Carlo tree search (UCT) for a single accept/reject decision.

The tree is closed-loop: decision nodes are keyed by ``(t, w, j)`` and
chance outcomes are resampled instead of being stored. Consecutive
simulations share one demand scenario (common random numbers), so a freshly
expanded node compares reject and accept on identical future demand.
Action 0 is reject and action 1 is accept, so exact ties favour rejecting.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Callable

import numpy as np

from .. import kernels
from ..instance import InstanceSpec, arrival_table
from ..simulator import BookingState
from .base import Policy
from .sarsa import SarsaPolicy

REJECT, ACCEPT = 0, 1

# acceptance probability of the random rollout policy
DEFAULT_BASE_P = 0.1

# exploration constant by (family, base policy, simulations)
UCT_CONSTANTS = {
    (4, "rand", 30): 1.0, (4, "rand", 100): 1.0, (4, "sarsa", 30): 1.0, (4, "sarsa", 100): 10.0,
    (10, "rand", 30): 1.0, (10, "rand", 100): 1.0, (10, "sarsa", 30): 0.001, (10, "sarsa", 100): 0.001,
    (15, "rand", 30): 100.0, (15, "rand", 100): 100.0, (15, "sarsa", 30): 100.0, (15, "sarsa", 100): 1.0,
    (50, "rand", 30): 10.0, (50, "rand", 100): 100.0, (50, "sarsa", 30): 10.0, (50, "sarsa", 100): 100.0,
}

# node layout: [N_reject, N_accept, W_reject, W_accept, visits]
N0, N1, W0, W1, VISITS = range(5)


def uct_select(stats, c: float) -> int:
    """Unvisited actions first (reject before accept), then max mean + c*sqrt(ln N / N_a)."""
    if stats[N0] == 0:
        return REJECT
    if stats[N1] == 0:
        return ACCEPT
    log_n = math.log(stats[N0] + stats[N1])
    s0 = stats[W0] / stats[N0] + c * math.sqrt(log_n / stats[N0])
    s1 = stats[W1] / stats[N1] + c * math.sqrt(log_n / stats[N1])
    return ACCEPT if s1 > s0 else REJECT


def final_action(stats) -> int:
    """Most visited action; ties by mean value, then reject."""
    if stats[N1] != stats[N0]:
        return ACCEPT if stats[N1] > stats[N0] else REJECT
    if stats[N0] == 0:
        return REJECT
    return ACCEPT if stats[W1] / stats[N1] > stats[W0] / stats[N0] else REJECT


class SearchTree:
    def __init__(self, spec: InstanceSpec, terminal: Callable, c: float,
                 base: str = "rand", base_p: float = DEFAULT_BASE_P, base_policy: SarsaPolicy | None = None):
        if base not in ("rand", "sarsa"):
            raise ValueError(f"unknown base policy {base!r}")
        if base == "sarsa" and base_policy is None:
            raise ValueError("a SARSA base policy needs a trained network")
        self.spec = spec
        self.terminal = terminal
        self.c = c
        self.base = base
        self.base_p = base_p
        self.base_policy = base_policy
        self.nodes: dict = {}
        table = arrival_table(spec)
        self._cum = table.cumulative
        self._cum_rows = table.cumulative.tolist()
        self._revenues = np.asarray(spec.revenues, dtype=np.float64)

    def _sample(self, t: int, u: float) -> int:
        j = bisect_right(self._cum_rows[t - 1], u)
        return min(j, self.spec.n)

    def _rollout(self, t: int, w: list, uniforms: np.ndarray) -> tuple[float, tuple]:
        """Play periods t..T with the base policy; returns (revenue, final state)."""
        T = self.spec.T
        if t > T:
            return 0.0, tuple(w)
        if self.base == "rand":
            warr = np.array(w, dtype=np.int64)
            rev = kernels.random_rollout(self._cum, self._revenues, t, warr, self.base_p,
                                         uniforms[2 * (t - 1):])
            return rev, tuple(warr.tolist())
        revenue = 0.0
        decide = self.base_policy.decide
        for s in range(t, T + 1):
            j = self._sample(s, uniforms[2 * (s - 1)])
            if j and decide(BookingState(s, tuple(w)), j):
                w[j - 1] += 1
                revenue += self.spec.revenues[j - 1]
        return revenue, tuple(w)

    def simulate(self, t: int, w: tuple, j: int, uniforms: np.ndarray) -> None:
        """One selection / expansion / rollout / backup pass from decision (t, w, j)."""
        T = self.spec.T
        revenues = self.spec.revenues
        path = []
        total = 0.0
        w = list(w)
        while True:
            key = (t, tuple(w), j)
            stats = self.nodes.get(key)
            expanded = stats is None
            if expanded:
                stats = self.nodes[key] = [0, 0, 0.0, 0.0, 0]
            a = uct_select(stats, self.c)
            path.append((stats, a, total))
            if a == ACCEPT:
                total += revenues[j - 1]
                w[j - 1] += 1
            t += 1
            if expanded:
                rev, final = self._rollout(t, w, uniforms)
                total += rev
                break
            j = 0
            while t <= T:
                j = self._sample(t, uniforms[2 * (t - 1)])
                if j:
                    break
                t += 1
            if t > T:
                final = tuple(w)
                break
        ret = total + self.terminal(final)
        for stats, a, before in path:
            stats[a] += 1
            stats[W0 + a] += ret - before
            stats[VISITS] += 1


def mcts_decide(state, j: int, spec: InstanceSpec, terminal: Callable, simulations: int,
                c: float, rng: np.random.Generator, base: str = "rand", base_p: float = DEFAULT_BASE_P,
                base_policy: SarsaPolicy | None = None, on_simulation=None) -> bool:
    """Search from decision (state, j) and return True to accept.

    ``on_simulation(tree)`` is called after every simulation, for instrumentation.
    """
    tree = SearchTree(spec, terminal, c, base, base_p, base_policy)
    root = (state.t, tuple(state.w), j)
    width = 2 * spec.T
    uniforms = None
    for i in range(simulations):
        if i % 2 == 0:
            uniforms = rng.random(width)
        tree.simulate(state.t, tuple(state.w), j, uniforms)
        if on_simulation is not None:
            on_simulation(tree)
    return final_action(tree.nodes[root]) == ACCEPT if simulations else False


class MCTSPolicy(Policy):
    kind = "mcts"

    def __init__(self, spec: InstanceSpec, terminal: Callable, simulations: int = 30,
                 c: float | None = None, base: str = "rand", base_p: float = DEFAULT_BASE_P,
                 base_policy: SarsaPolicy | None = None, seed: int = 0):
        super().__init__()
        if c is None:
            c = UCT_CONSTANTS.get((spec.family, base, simulations), 1.0)
        self.spec = spec
        self.terminal = terminal
        self.simulations = simulations
        self.c = c
        self.base = base
        self.base_p = base_p
        self.base_policy = base_policy
        self.rng = np.random.default_rng(seed)

    def reset(self, seed=None):
        self.rng = np.random.default_rng(seed)

    def decide(self, state, j):
        return mcts_decide(state, j, self.spec, self.terminal, self.simulations, self.c,
                           self.rng, self.base, self.base_p, self.base_policy)

    def describe(self):
        return {"kind": self.kind, "simulations": self.simulations, "c": self.c,
                "base": self.base, "base_p": self.base_p}
