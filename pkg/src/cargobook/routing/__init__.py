from .binpack import min_bins, min_vehicles, split_demands
from .cost import ExactCost, OperationalCost, fleet_size, operational_cost
from .cvrp import InfeasibleRouting, RoutingProblem, VrpSolution, exact_cvrp, solve_cvrp

__all__ = [
    "ExactCost",
    "InfeasibleRouting",
    "OperationalCost",
    "RoutingProblem",
    "VrpSolution",
    "exact_cvrp",
    "fleet_size",
    "min_bins",
    "min_vehicles",
    "operational_cost",
    "solve_cvrp",
    "split_demands",
]
