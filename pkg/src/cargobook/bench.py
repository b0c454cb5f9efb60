"""Paired evaluation of booking policies on shared demand realizations."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .instance import InstanceSpec
from .policies.base import Policy
from .routing.cost import ExactCost
from .simulator import events_digest, run_episode

REPORT_FORMAT = "cargobook-report/1"
TABLE_FORMAT = "cargobook-profits/1"


class MethodMismatch(ValueError):
    """A policy was built for a different instance than the one being evaluated."""


@dataclass
class EvalReport:
    methods: list[str]
    profits: np.ndarray  # (methods, realizations)
    gaps: np.ndarray
    online_seconds: np.ndarray  # per method, summed over realizations
    offline_seconds: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def mean_profit(self) -> dict[str, float]:
        return {m: float(v) for m, v in zip(self.methods, self.profits.mean(axis=1))}

    @property
    def best_known(self) -> np.ndarray:
        return self.profits.max(axis=0)

    def summary(self) -> list[dict]:
        rows = []
        for i, m in enumerate(self.methods):
            rows.append({
                "method": m,
                "mean_profit": float(self.profits[i].mean()),
                "median_gap": float(np.median(self.gaps[i])),
                "mean_gap": float(self.gaps[i].mean()),
                "online_seconds": float(self.online_seconds[i]),
                "offline_seconds": float(self.offline_seconds[i]),
            })
        return rows


def gaps_to_best(profits: np.ndarray) -> np.ndarray:
    """Percentage shortfall of each row against the column-wise best; 0 where the best is 0."""
    profits = np.asarray(profits, dtype=np.float64)
    best = profits.max(axis=0)
    denom = np.where(best == 0, 1.0, np.abs(best))
    gaps = 100.0 * (best - profits) / denom
    gaps[:, best == 0] = 0.0
    return gaps


def _policy_instance(policy: Policy) -> str | None:
    spec = getattr(policy, "spec", None) or getattr(getattr(policy, "table", None), "spec", None)
    if spec is not None:
        return spec.digest()
    return policy.provenance.get("instance")


def episode_seed(seed: int, realization: int) -> int:
    """Per-realization seed for stochastic policies, independent of method order."""
    return int(np.random.SeedSequence([seed, realization]).generate_state(1)[0])


def evaluate(
    spec: InstanceSpec,
    methods: Sequence[tuple[str, Policy]],
    realizations: Sequence[Sequence[int]],
    exact: Callable | None = None,
    seed: int = 0,
) -> EvalReport:
    """Replay every method on every realization and score final states with exact Gamma.

    ``exact`` defaults to a fresh memoized routing oracle shared by all methods.
    """
    if not methods:
        raise ValueError("no methods to evaluate")
    names = [name for name, _ in methods]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate method names in {names}")
    digest = spec.digest()
    for name, policy in methods:
        owner = _policy_instance(policy)
        if owner is not None and owner != digest:
            raise MethodMismatch(f"method {name} was built for instance {owner}, not {digest}")
    for r, ev in enumerate(realizations):
        if len(ev) != spec.T:
            raise ValueError(f"realization {r} has {len(ev)} periods, instance has T={spec.T}")

    exact = exact if exact is not None else ExactCost(spec)
    M, R = len(methods), len(realizations)
    profits = np.zeros((M, R))
    online = np.zeros(M)
    for i, (_, policy) in enumerate(methods):
        for r, events in enumerate(realizations):
            policy.reset(episode_seed(seed, r))
            start = time.perf_counter()
            traj = run_episode(spec, policy, events=events)
            gamma = exact(traj.final_state.w)
            online[i] += time.perf_counter() - start
            profits[i, r] = traj.revenue + gamma

    provenance = {
        "instance": digest,
        "seed": seed,
        "realizations": [events_digest(ev) for ev in realizations],
        "methods": {name: {**policy.describe(), "provenance": policy.provenance} for name, policy in methods},
    }
    offline = np.array([policy.offline_seconds for _, policy in methods], dtype=np.float64)
    return EvalReport(names, profits, gaps_to_best(profits), online, offline, provenance)


def _table_text(report: EvalReport) -> str:
    buf = io.StringIO()
    buf.write(f"# format: {TABLE_FORMAT}\n")
    buf.write(f"# instance: {report.provenance.get('instance')}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "realization", "profit", "gap"])
    for i, m in enumerate(report.methods):
        for r in range(report.profits.shape[1]):
            writer.writerow([m, r, repr(float(report.profits[i, r])), repr(float(report.gaps[i, r]))])
    return buf.getvalue()


def export(report: EvalReport, out_dir, stem: str = "report", timings: bool = False) -> tuple[Path, Path]:
    """Write ``<stem>.json`` (summary + provenance) and ``<stem>.csv`` (one row per method and realization).

    Wall-clock timings are omitted unless ``timings`` is set, so reruns give identical bytes.
    """
    if not report.methods:
        raise ValueError("report has no methods")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = report.summary()
    if not timings:
        for row in summary:
            row.pop("online_seconds")
            row.pop("offline_seconds")
    doc = {
        "format": REPORT_FORMAT,
        "provenance": report.provenance,
        "summary": summary,
        "profits": {m: report.profits[i].tolist() for i, m in enumerate(report.methods)},
    }
    json_path = out_dir / f"{stem}.json"
    csv_path = out_dir / f"{stem}.csv"
    json_path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    csv_path.write_text(_table_text(report))
    return json_path, csv_path


def format_summary(report: EvalReport, timings: bool = True) -> str:
    head = f"{'method':<18}{'mean profit':>13}{'median gap %':>14}"
    if timings:
        head += f"{'online s':>11}{'offline s':>11}"
    lines = [head]
    for row in report.summary():
        line = f"{row['method']:<18}{row['mean_profit']:>13.3f}{row['median_gap']:>14.3f}"
        if timings:
            line += f"{row['online_seconds']:>11.2f}{row['offline_seconds']:>11.2f}"
        lines.append(line)
    return "\n".join(lines)
