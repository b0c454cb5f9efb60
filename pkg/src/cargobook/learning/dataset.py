"""Labeled terminal states from random-acceptance rollouts."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..features import extract, feature_names
from ..instance import InstanceSpec, arrival_table
from ..routing.cost import fleet_size, routing_cost
from ..simulator import NO_REQUEST, sample_events

P_SCHEDULE = (0.10, 0.25, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95, 0.99, 1.0)
TEST_FRACTION = 0.2
DATASET_FORMAT = "cargobook-dataset/1"


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    states: np.ndarray
    p: np.ndarray
    is_test: np.ndarray
    layout: list[str]
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.y.size)

    @property
    def train(self):
        keep = ~self.is_test
        return self.X[keep], self.y[keep]

    @property
    def test(self):
        return self.X[self.is_test], self.y[self.is_test]

    def save(self, path) -> None:
        buf = io.StringIO()
        buf.write(f"# format: {DATASET_FORMAT}\n")
        for key in sorted(self.provenance):
            buf.write(f"# {key}: {json.dumps(self.provenance[key])}\n")
        writer = csv.writer(buf, lineterminator="\n")
        n = self.states.shape[1]
        writer.writerow(self.layout + ["label", "p", "split"] + [f"state{j + 1}" for j in range(n)])
        for i in range(len(self)):
            writer.writerow(
                [repr(float(v)) for v in self.X[i]]
                + [repr(float(self.y[i])), repr(float(self.p[i])), "test" if self.is_test[i] else "train"]
                + [str(int(v)) for v in self.states[i]]
            )
        Path(path).write_text(buf.getvalue())

    @classmethod
    def load(cls, path) -> "Dataset":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"dataset file not found: {path}")
        provenance = {}
        rows = []
        fmt = None
        with path.open() as fh:
            lines = [ln for ln in fh]
        body = []
        for ln in lines:
            if ln.startswith("# "):
                key, _, val = ln[2:].rstrip("\n").partition(": ")
                if key == "format":
                    fmt = val
                else:
                    provenance[key] = json.loads(val)
            else:
                body.append(ln)
        if fmt != DATASET_FORMAT:
            raise ValueError(f"unsupported dataset format {fmt!r}")
        reader = csv.reader(body)
        header = next(reader)
        label_at = header.index("label")
        layout = header[:label_at]
        for row in reader:
            rows.append(row)
        X = np.array([[float(v) for v in r[:label_at]] for r in rows])
        y = np.array([float(r[label_at]) for r in rows])
        p = np.array([float(r[label_at + 1]) for r in rows])
        is_test = np.array([r[label_at + 2] == "test" for r in rows])
        states = np.array([[int(v) for v in r[label_at + 3 :]] for r in rows], dtype=np.int64)
        return cls(X, y, states, p, is_test, layout, provenance)


def rand_p_terminal_state(spec: InstanceSpec, events, p: float, rng: np.random.Generator):
    w = [0] * spec.n
    for event in events:
        if event != NO_REQUEST and rng.random() < p:
            w[event - 1] += 1
    return tuple(w)


def generate_dataset(spec: InstanceSpec, total_size: int, seed: int) -> Dataset:
    """Simulate ``total_size`` rand-p episodes, equally split over the p schedule.

    Each terminal state is labeled with its routing cost z* at the minimal
    feasible fleet; outsourcing is left to the prediction step.
    """
    if total_size <= 0 or total_size % len(P_SCHEDULE):
        raise ValueError(f"total_size must be a positive multiple of {len(P_SCHEDULE)}")
    per_p = total_size // len(P_SCHEDULE)
    table = arrival_table(spec)
    rng = np.random.default_rng(seed)
    labels: dict[tuple[int, ...], float] = {}
    states, ps = [], []
    for p in P_SCHEDULE:
        for _ in range(per_p):
            events = sample_events(table, rng)
            w = rand_p_terminal_state(spec, events, p, rng)
            if w not in labels:
                labels[w] = routing_cost(w, spec).cost if fleet_size(w, spec) else 0.0
            states.append(w)
            ps.append(p)

    is_test = np.zeros(total_size, dtype=bool)
    n_test = round(per_p * TEST_FRACTION)
    for g in range(len(P_SCHEDULE)):
        perm = rng.permutation(per_p)
        is_test[g * per_p + perm[:n_test]] = True

    X = np.array([extract(w, spec) for w in states])
    y = np.array([labels[w] for w in states])
    provenance = {
        "instance": spec.digest(),
        "seed": seed,
        "size": total_size,
        "p_schedule": list(P_SCHEDULE),
        "distinct_states": len(labels),
    }
    return Dataset(X, y, np.array(states, dtype=np.int64), np.array(ps), is_test,
                   feature_names(spec.n), provenance)
