"""Backward induction over all reachable booking states."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Callable, Iterator

from ..instance import InstanceSpec, arrival_table
from .base import POLICY_FORMAT, Policy

DEFAULT_STATE_CAP = 3_000_000


class StateSpaceTooLarge(RuntimeError):
    pass


def states_with_total_at_most(n: int, total: int) -> Iterator[tuple[int, ...]]:
    """All non-negative integer n-vectors whose entries sum to at most ``total``."""
    if n == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in states_with_total_at_most(n - 1, total - first):
            yield (first,) + rest


def state_count(n: int, T: int) -> int:
    """Number of (t, w) pairs over periods 1..T+1."""
    return sum(math.comb(t - 1 + n, n) for t in range(1, T + 2))


class ValueTable:
    """``values[t][w]`` for t in 1..T+1; index 0 is unused."""

    def __init__(self, spec: InstanceSpec, values: list[dict], terminal_kind: str):
        self.spec = spec
        self.values = values
        self.terminal_kind = terminal_kind

    def __getitem__(self, key):
        t, w = key
        return self.values[t][tuple(w)]

    def save(self, path) -> None:
        doc = {
            "format": POLICY_FORMAT,
            "kind": "dp",
            "instance": self.spec.digest(),
            "terminal": self.terminal_kind,
            "T": self.spec.T,
            "n": self.spec.n,
            "layers": [
                [list(w) + [v] for w, v in sorted(self.values[t].items())]
                for t in range(1, self.spec.T + 2)
            ],
        }
        Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path, spec: InstanceSpec) -> "ValueTable":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"value table not found: {path}")
        doc = json.loads(path.read_text())
        if doc.get("format") != POLICY_FORMAT or doc.get("kind") != "dp":
            raise ValueError(f"{path} is not a DP value table")
        if doc["instance"] != spec.digest():
            raise ValueError(f"{path} belongs to instance {doc['instance']}")
        values = [dict()]
        for layer in doc["layers"]:
            values.append({tuple(int(x) for x in row[:-1]): float(row[-1]) for row in layer})
        return cls(spec, values, doc["terminal"])


def dp_solve(
    spec: InstanceSpec,
    terminal: Callable,
    terminal_kind: str = "custom",
    state_cap: int = DEFAULT_STATE_CAP,
) -> ValueTable:
    """Solve the booking MDP exactly for a given terminal cost ``terminal(w)``.

    Only states with at most t-1 acceptances by period t are stored.
    """
    n, T = spec.n, spec.T
    count = state_count(n, T)
    if count > state_cap:
        raise StateSpaceTooLarge(f"{count} states exceed the cap of {state_cap}")
    probs = arrival_table(spec).probs
    revenues = spec.revenues
    values: list[dict] = [dict() for _ in range(T + 2)]

    final_states = list(states_with_total_at_most(n, T))
    if hasattr(terminal, "prefill"):
        terminal.prefill(final_states)
    values[T + 1] = {w: float(terminal(w)) for w in final_states}

    for t in range(T, 0, -1):
        nxt = values[t + 1]
        row = probs[t - 1].tolist()
        layer = {}
        for w in states_with_total_at_most(n, t - 1):
            stay = nxt[w]
            val = row[0] * stay
            for j in range(n):
                up = w[:j] + (w[j] + 1,) + w[j + 1 :]
                val += row[j + 1] * max(revenues[j] + nxt[up], stay)
            layer[w] = val
        values[t] = layer
    return ValueTable(spec, values, terminal_kind)


def dp_decide(table: ValueTable, state, j: int) -> bool:
    """Accept iff revenue plus the post-acceptance value beats rejecting; ties reject."""
    nxt = table.values[state.t + 1]
    w = tuple(state.w)
    up = w[: j - 1] + (w[j - 1] + 1,) + w[j:]
    try:
        return table.spec.revenues[j - 1] + nxt[up] > nxt[w]
    except KeyError as exc:
        raise KeyError(f"state (t={state.t}, w={w}) is not in the value table") from exc


class DPPolicy(Policy):
    kind = "dp"

    def __init__(self, table: ValueTable):
        super().__init__()
        self.table = table

    def decide(self, state, j):
        return dp_decide(self.table, state, j)

    def describe(self):
        return {"kind": self.kind, "terminal": self.table.terminal_kind}
