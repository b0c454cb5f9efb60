"""Booking dynamics: event sampling, transitions and episode rollout.

Events are plain integers: 0 means no request in the period, ``j >= 1``
is a request for location ``j`` (1-based, so location index ``j - 1``).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .instance import ArrivalTable, InstanceSpec, arrival_table

NO_REQUEST = 0
REALIZATION_FORMAT = "cargobook-realizations/1"


@dataclass(frozen=True)
class BookingState:
    t: int
    w: tuple[int, ...]

    @classmethod
    def initial(cls, n: int) -> "BookingState":
        return cls(1, (0,) * n)


class Policy(Protocol):
    def decide(self, state: BookingState, j: int) -> bool: ...


@dataclass
class Trajectory:
    events: list[int]
    actions: list[int | None]
    revenue: float
    final_state: BookingState


def sample_event(table: ArrivalTable, t: int, rng: np.random.Generator) -> int:
    if not 1 <= t <= table.T:
        raise IndexError(f"period {t} outside 1..{table.T}")
    u = rng.random()
    return int(np.searchsorted(table.cumulative[t - 1], u, side="right"))


def sample_events(table: ArrivalTable, rng: np.random.Generator) -> list[int]:
    """One full-horizon realization of request events."""
    u = rng.random(table.T)
    return [int(np.searchsorted(table.cumulative[t], u[t], side="right")) for t in range(table.T)]


def step(state: BookingState, event: int, accept: bool, revenues: Sequence[float]):
    """Advance one period. Returns ``(next_state, reward)``."""
    if event == NO_REQUEST or not accept:
        return BookingState(state.t + 1, state.w), 0.0
    w = list(state.w)
    w[event - 1] += 1
    return BookingState(state.t + 1, tuple(w)), float(revenues[event - 1])


def run_episode(spec: InstanceSpec, policy: Policy, events=None, rng=None) -> Trajectory:
    """Play one booking horizon. Pass either a fixed ``events`` list or an ``rng``."""
    if events is None:
        if rng is None:
            raise ValueError("run_episode needs either an event list or a random generator")
        events = sample_events(arrival_table(spec), rng)
    if len(events) != spec.T:
        raise ValueError(f"event list has {len(events)} periods, instance has T={spec.T}")
    state = BookingState.initial(spec.n)
    revenue = 0.0
    actions: list[int | None] = []
    for event in events:
        if event == NO_REQUEST:
            actions.append(None)
            state = BookingState(state.t + 1, state.w)
            continue
        accept = bool(policy.decide(state, event))
        actions.append(int(accept))
        state, reward = step(state, event, accept, spec.revenues)
        revenue += reward
    return Trajectory(list(events), actions, revenue, state)


def replay(spec: InstanceSpec, events, actions) -> tuple[BookingState, float]:
    state = BookingState.initial(spec.n)
    revenue = 0.0
    for event, action in zip(events, actions):
        state, reward = step(state, event, bool(action), spec.revenues)
        revenue += reward
    return state, revenue


def total_profit(traj: Trajectory, gamma_value: float) -> float:
    return traj.revenue + gamma_value


def events_digest(events: Sequence[int]) -> str:
    return hashlib.sha256(",".join(map(str, events)).encode()).hexdigest()[:16]


def generate_realizations(spec: InstanceSpec, count: int, seed: int) -> list[list[int]]:
    table = arrival_table(spec)
    rng = np.random.default_rng(seed)
    return [sample_events(table, rng) for _ in range(count)]


def save_realizations(path, spec: InstanceSpec, realizations, seed: int) -> None:
    doc = {
        "format": REALIZATION_FORMAT,
        "instance": spec.digest(),
        "seed": seed,
        "T": spec.T,
        "count": len(realizations),
        "events": [" ".join(map(str, ev)) for ev in realizations],
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_realizations(path, spec: InstanceSpec | None = None) -> list[list[int]]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"realization file not found: {path}")
    doc = json.loads(path.read_text())
    if doc.get("format") != REALIZATION_FORMAT:
        raise ValueError(f"unsupported realization format {doc.get('format')!r}")
    if spec is not None and doc["instance"] != spec.digest():
        raise ValueError(f"{path} was generated for instance {doc['instance']}, not {spec.digest()}")
    return [[int(x) for x in line.split()] for line in doc["events"]]
