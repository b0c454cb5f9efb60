"""End-of-horizon operational cost: routing plus outsourced vehicles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..instance import InstanceSpec
from .binpack import min_vehicles
from .cvrp import RoutingProblem, VrpSolution, solve_cvrp


@dataclass(frozen=True)
class OperationalCost:
    gamma: float
    K: int
    z_star: float
    outsourced: int
    solution: VrpSolution = field(compare=False, repr=False)

    @property
    def K_used(self) -> int:
        return self.solution.K_used


def fleet_size(w: Sequence[int], spec: InstanceSpec) -> int:
    """Vehicles charged for state ``w``: the free fleet or the packing minimum, whichever is larger."""
    if not any(w):
        return 0
    return max(spec.K0, min_vehicles(w, spec.Q))


def routing_cost(w: Sequence[int], spec: InstanceSpec, K: int | None = None) -> VrpSolution:
    if K is None:
        K = fleet_size(w, spec)
    problem = RoutingProblem.from_state(w, spec.coords, spec.depot, spec.Q, K)
    return solve_cvrp(problem)


def operational_cost(w: Sequence[int], spec: InstanceSpec) -> OperationalCost:
    """Gamma(w) = -(z* + C * (K - K0)) at the smallest feasible fleet K >= K0."""
    if len(w) != spec.n:
        raise ValueError(f"state has {len(w)} entries, instance has n={spec.n}")
    K = fleet_size(w, spec)
    if K == 0:
        return OperationalCost(0.0, 0, 0.0, 0, VrpSolution([], 0.0))
    sol = routing_cost(w, spec, K)
    outsourced = K - spec.K0
    gamma = -(sol.cost + spec.C * outsourced)
    return OperationalCost(gamma, K, sol.cost, outsourced, sol)


class ExactCost:
    """Memoized callable ``w -> Gamma(w)`` backed by the routing heuristic."""

    def __init__(self, spec: InstanceSpec):
        self.spec = spec
        self.cache: dict[tuple[int, ...], float] = {}
        self.calls = 0

    def __call__(self, w) -> float:
        key = tuple(int(x) for x in w)
        val = self.cache.get(key)
        if val is None:
            self.calls += 1
            val = operational_cost(key, self.spec).gamma
            self.cache[key] = val
        return val
