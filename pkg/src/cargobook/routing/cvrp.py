"""Capacitated vehicle routing: savings + local search heuristic, and an exact solver.

Nodes are numbered with 0 as the depot and 1..m as customers. Routes in a
:class:`VrpSolution` list customer numbers (1-based) without the depot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .binpack import min_bins, pack_items, split_demands

EPS = 1e-9
MAX_SWEEPS = 1000
EXACT_LIMIT = 8
# perturb-and-descend rounds after the constructive starts
ILS_ROUNDS = 20


class InfeasibleRouting(ValueError):
    pass


@dataclass
class RoutingProblem:
    points: list[tuple[float, float]]
    demands: list[int]
    depot: tuple[float, float]
    Q: int
    K: int
    locations: list[int] = field(default_factory=list)

    def __post_init__(self):
        if len(self.points) != len(self.demands):
            raise ValueError("points and demands differ in length")
        if any(d < 1 or d > self.Q for d in self.demands):
            raise ValueError(f"every demand must lie in 1..Q={self.Q}")
        if not self.locations:
            self.locations = list(range(len(self.points)))

    @property
    def size(self) -> int:
        return len(self.points)

    @classmethod
    def from_state(cls, w: Sequence[int], coords, depot, Q: int, K: int) -> "RoutingProblem":
        """Customers for every location with accepted requests, split so no demand exceeds Q."""
        items = split_demands(w, Q)
        return cls(
            points=[tuple(coords[j]) for j, _ in items],
            demands=[size for _, size in items],
            depot=tuple(depot),
            Q=Q,
            K=K,
            locations=[j for j, _ in items],
        )

    def distance_matrix(self) -> list[list[float]]:
        pts = np.array([self.depot] + list(self.points), dtype=np.float64).reshape(-1, 2)
        diff = pts[:, None, :] - pts[None, :, :]
        return np.sqrt((diff**2).sum(axis=2)).tolist()


@dataclass
class VrpSolution:
    routes: list[list[int]]
    cost: float

    @property
    def K_used(self) -> int:
        return len(self.routes)


def route_length(route: Sequence[int], D) -> float:
    if not route:
        return 0.0
    total = D[0][route[0]] + D[route[-1]][0]
    for a, b in zip(route, route[1:]):
        total += D[a][b]
    return total


def solution_cost(routes, D) -> float:
    return sum(route_length(r, D) for r in routes)


def check_solution(problem: RoutingProblem, sol: VrpSolution, tol: float = 1e-6) -> None:
    """Raise AssertionError if ``sol`` violates any routing constraint."""
    seen = sorted(c for r in sol.routes for c in r)
    assert seen == list(range(1, problem.size + 1)), "each customer must be visited exactly once"
    for r in sol.routes:
        assert r, "empty route"
        assert sum(problem.demands[c - 1] for c in r) <= problem.Q, "capacity exceeded"
    assert sol.K_used <= problem.K, "too many vehicles"
    D = problem.distance_matrix()
    assert abs(solution_cost(sol.routes, D) - sol.cost) <= tol, "cost mismatch"


def _check_fleet(problem: RoutingProblem) -> None:
    if problem.size and min_bins(problem.demands, problem.Q) > problem.K:
        raise InfeasibleRouting(
            f"{problem.size} customers need more than K={problem.K} vehicles of capacity {problem.Q}"
        )


def savings_routes(D, demands, Q) -> list[list[int]]:
    """Parallel Clarke-Wright savings construction."""
    m = len(demands)
    pairs = []
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            pairs.append((D[0][i] + D[0][j] - D[i][j], i, j))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))

    route_of = list(range(m + 1))
    routes = {i: [i] for i in range(1, m + 1)}
    loads = {i: demands[i - 1] for i in range(1, m + 1)}
    for saving, i, j in pairs:
        if saving < -EPS:
            break
        ri, rj = route_of[i], route_of[j]
        if ri == rj or loads[ri] + loads[rj] > Q:
            continue
        a, b = routes[ri], routes[rj]
        if a[-1] == i and b[0] == j:
            merged = a + b
        elif a[0] == i and b[-1] == j:
            merged = b + a
        elif a[-1] == i and b[-1] == j:
            merged = a + b[::-1]
        elif a[0] == i and b[0] == j:
            merged = a[::-1] + b
        else:
            continue
        routes[ri] = merged
        loads[ri] += loads.pop(rj)
        del routes[rj]
        for c in merged:
            route_of[c] = ri
    return [routes[k] for k in sorted(routes)]


def _nearest_neighbour_order(members: list[int], D) -> list[int]:
    left = sorted(members)
    order = []
    cur = 0
    while left:
        nxt = min(left, key=lambda c: (D[cur][c], c))
        order.append(nxt)
        left.remove(nxt)
        cur = nxt
    return order


def packing_routes(D, demands, Q, K) -> list[list[int]]:
    """Fallback construction: exact packing into K bins, each bin ordered greedily."""
    bins = pack_items(demands, Q, K)
    if bins is None:
        raise InfeasibleRouting(f"demands do not fit into {K} vehicles")
    return [_nearest_neighbour_order([i + 1 for i in b], D) for b in bins]


def _best_two_opt(routes, D):
    best = (0.0, None)
    for r, route in enumerate(routes):
        L = len(route)
        if L < 3:
            continue
        ext = [0] + route + [0]
        for i in range(1, L):
            a, ci = ext[i - 1], ext[i]
            for j in range(i + 1, L + 1):
                cj, b = ext[j], ext[j + 1]
                delta = D[a][cj] + D[ci][b] - D[a][ci] - D[cj][b]
                if delta < best[0] - EPS:
                    best = (delta, ("2opt", r, i - 1, j - 1))
    return best


def _best_relocate(routes, loads, demands, D, Q):
    best = (0.0, None)
    for r, route in enumerate(routes):
        ext = [0] + route + [0]
        for i in range(1, len(ext) - 1):
            c = ext[i]
            a, b = ext[i - 1], ext[i + 1]
            gain = D[a][c] + D[c][b] - D[a][b]
            dem = demands[c - 1]
            for s, target in enumerate(routes):
                if s == r:
                    reduced = route[: i - 1] + route[i:]
                    text = [0] + reduced + [0]
                    for k in range(1, len(text)):
                        if k == i:
                            continue
                        p, q = text[k - 1], text[k]
                        delta = D[p][c] + D[c][q] - D[p][q] - gain
                        if delta < best[0] - EPS:
                            best = (delta, ("reloc", r, i - 1, s, k - 1))
                    continue
                if loads[s] + dem > Q:
                    continue
                text = [0] + target + [0]
                for k in range(1, len(text)):
                    p, q = text[k - 1], text[k]
                    delta = D[p][c] + D[c][q] - D[p][q] - gain
                    if delta < best[0] - EPS:
                        best = (delta, ("reloc", r, i - 1, s, k - 1))
    return best


def _best_insertion(ext, c, D):
    """Cheapest (delta, position) to insert ``c`` into the depot-padded route ``ext``."""
    best, pos = math.inf, 0
    for k in range(1, len(ext)):
        p, q = ext[k - 1], ext[k]
        delta = D[p][c] + D[c][q] - D[p][q]
        if delta < best - 1e-12:
            best, pos = delta, k - 1
    return best, pos


def _best_swap(routes, loads, demands, D, Q):
    """Exchange two customers of different routes, reinserting each at its best position."""
    best = (0.0, None)
    removed = []
    for route in routes:
        ext = [0] + route + [0]
        rows = []
        for i in range(1, len(ext) - 1):
            c = ext[i]
            gain = D[ext[i - 1]][c] + D[c][ext[i + 1]] - D[ext[i - 1]][ext[i + 1]]
            rows.append((c, gain, ext[:i] + ext[i + 1 :]))
        removed.append(rows)
    for r in range(len(routes)):
        for s in range(r + 1, len(routes)):
            for i, (c1, g1, red_r) in enumerate(removed[r]):
                d1 = demands[c1 - 1]
                for k, (c2, g2, red_s) in enumerate(removed[s]):
                    d2 = demands[c2 - 1]
                    if loads[r] - d1 + d2 > Q or loads[s] - d2 + d1 > Q:
                        continue
                    ins2, pos_r = _best_insertion(red_r, c2, D)
                    ins1, pos_s = _best_insertion(red_s, c1, D)
                    delta = ins1 + ins2 - g1 - g2
                    if delta < best[0] - EPS:
                        best = (delta, ("swap", r, i, s, k, pos_r, pos_s))
    return best


def _best_two_opt_star(routes, loads, demands, D, Q):
    """Exchange route tails: r = head_r + tail_s, s = head_s + tail_r (or the reversed pairing)."""
    best = (0.0, None)
    prefix = []
    for route in routes:
        acc = [0]
        for c in route:
            acc.append(acc[-1] + demands[c - 1])
        prefix.append(acc)
    for r in range(len(routes)):
        er = [0] + routes[r] + [0]
        Lr = len(routes[r])
        for s in range(r + 1, len(routes)):
            es = [0] + routes[s] + [0]
            Ls = len(routes[s])
            for i in range(Lr + 1):
                a1, b1 = er[i], er[i + 1]
                head_r = prefix[r][i]
                for k in range(Ls + 1):
                    a2, b2 = es[k], es[k + 1]
                    head_s = prefix[s][k]
                    # heads keep orientation, tails swap
                    if head_r + loads[s] - head_s <= Q and head_s + loads[r] - head_r <= Q:
                        delta = D[a1][b2] + D[a2][b1] - D[a1][b1] - D[a2][b2]
                        if delta < best[0] - EPS:
                            best = (delta, ("tails", r, i, s, k))
                    # head of r joins reversed head of s
                    if head_r + head_s <= Q and (loads[r] - head_r) + (loads[s] - head_s) <= Q:
                        delta = D[a1][a2] + D[b1][b2] - D[a1][b1] - D[a2][b2]
                        if delta < best[0] - EPS:
                            best = (delta, ("heads", r, i, s, k))
    return best


def _apply(routes, loads, demands, move):
    kind = move[0]
    if kind in ("tails", "heads"):
        _, r, i, s, k = move
        hr, tr = routes[r][:i], routes[r][i:]
        hs, ts = routes[s][:k], routes[s][k:]
        if kind == "tails":
            routes[r], routes[s] = hr + ts, hs + tr
        else:
            routes[r], routes[s] = hr + hs[::-1], tr[::-1] + ts
        for idx in sorted((r, s), reverse=True):
            if not routes[idx]:
                del routes[idx]
        loads[:] = [sum(demands[c - 1] for c in rt) for rt in routes]
        return
    if kind == "2opt":
        _, r, i, j = move
        routes[r][i : j + 1] = routes[r][i : j + 1][::-1]
    elif kind == "reloc":
        _, r, i, s, k = move
        c = routes[r].pop(i)
        routes[s].insert(k, c)
        loads[r] -= demands[c - 1]
        loads[s] += demands[c - 1]
        if not routes[r]:
            del routes[r]
            del loads[r]
    else:
        _, r, i, s, k, pos_r, pos_s = move
        c1, c2 = routes[r].pop(i), routes[s].pop(k)
        routes[r].insert(pos_r, c2)
        routes[s].insert(pos_s, c1)
        loads[r] += demands[c2 - 1] - demands[c1 - 1]
        loads[s] += demands[c1 - 1] - demands[c2 - 1]


def local_search(routes, D, demands, Q, max_sweeps: int = MAX_SWEEPS, trace=None):
    """Best-improvement descent over 2-opt, relocate, swap and tail exchange.

    ``trace``, if given, receives the solution cost after every sweep.
    """
    routes = [list(r) for r in routes]
    loads = [sum(demands[c - 1] for c in r) for r in routes]
    for _ in range(max_sweeps):
        candidates = [
            _best_two_opt(routes, D),
            _best_relocate(routes, loads, demands, D, Q),
            _best_swap(routes, loads, demands, D, Q),
            _best_two_opt_star(routes, loads, demands, D, Q),
        ]
        delta, move = min(candidates, key=lambda c: c[0])
        if move is None:
            break
        _apply(routes, loads, demands, move)
        if trace is not None:
            trace.append(solution_cost(routes, D))
    return routes


def _perturb(routes, demands, Q, K, rng, count):
    """Pull ``count`` random customers out and put each back at a random feasible spot.

    Returns None when the reinsertion paints itself into a corner.
    """
    routes = [list(r) for r in routes]
    pulled = []
    for _ in range(count):
        r = int(rng.integers(len(routes)))
        pulled.append(routes[r].pop(int(rng.integers(len(routes[r])))))
        if not routes[r]:
            del routes[r]
    for c in pulled:
        loads = [sum(demands[x - 1] for x in rt) for rt in routes]
        options = [i for i, load in enumerate(loads) if load + demands[c - 1] <= Q]
        if len(routes) < K:
            options.append(len(routes))
        if not options:
            return None
        i = options[int(rng.integers(len(options)))]
        if i == len(routes):
            routes.append([c])
        else:
            routes[i].insert(int(rng.integers(len(routes[i]) + 1)), c)
    return routes


def solve_cvrp(problem: RoutingProblem, rounds: int = ILS_ROUNDS, seed: int = 0) -> VrpSolution:
    """Heuristic CVRP solution using at most ``problem.K`` vehicles.

    Local search runs from a savings start and an exact-packing start; the
    better result is then refined by ``rounds`` of perturb-and-descend, seeded
    by ``seed`` so the output is deterministic.
    """
    if problem.size == 0:
        return VrpSolution([], 0.0)
    _check_fleet(problem)
    D = problem.distance_matrix()
    demands, Q, K = problem.demands, problem.Q, problem.K
    starts = []
    routes = savings_routes(D, demands, Q)
    if len(routes) <= K:
        starts.append(routes)
    # a tight packing start escapes local optima that savings gets stuck in
    # when capacity, not distance, decides the partition
    starts.append(packing_routes(D, demands, Q, K))
    best = None
    for start in starts:
        routes = local_search(start, D, demands, Q)
        cost = solution_cost(routes, D)
        if best is None or cost < best.cost - EPS:
            best = VrpSolution(routes, cost)
    if problem.size < 3:
        return best
    rng = np.random.default_rng(seed)
    count = min(3, problem.size - 1)
    for _ in range(rounds):
        kicked = _perturb(best.routes, demands, Q, K, rng, count)
        if kicked is None:
            continue
        routes = local_search(kicked, D, demands, Q)
        cost = solution_cost(routes, D)
        if cost < best.cost - EPS:
            best = VrpSolution(routes, cost)
    return best


def _held_karp(D, m):
    """Shortest depot-to-depot tour through every customer subset (bitmask over 1..m)."""
    full = 1 << m
    INF = math.inf
    path = [[INF] * m for _ in range(full)]
    parent = [[-1] * m for _ in range(full)]
    for j in range(m):
        path[1 << j][j] = D[0][j + 1]
    for S in range(1, full):
        row = path[S]
        for j in range(m):
            base = row[j]
            if base == INF:
                continue
            for k in range(m):
                if S & (1 << k):
                    continue
                T = S | (1 << k)
                val = base + D[j + 1][k + 1]
                if val < path[T][k] - 1e-12:
                    path[T][k] = val
                    parent[T][k] = j
    tour = [0.0] * full
    last = [-1] * full
    for S in range(1, full):
        best, arg = INF, -1
        for j in range(m):
            if S & (1 << j):
                val = path[S][j] + D[j + 1][0]
                if val < best - 1e-12:
                    best, arg = val, j
        tour[S], last[S] = best, arg
    return tour, last, parent


def _unwind(S, j, parent):
    order = []
    while j != -1:
        order.append(j + 1)
        prev = parent[S][j]
        S &= ~(1 << j)
        j = prev
    return order[::-1]


def exact_cvrp(problem: RoutingProblem) -> VrpSolution:
    """Optimal solution by enumerating route partitions over exact subset tours."""
    m = problem.size
    if m > EXACT_LIMIT:
        raise ValueError(f"exact solver handles at most {EXACT_LIMIT} customers, got {m}")
    if m == 0:
        return VrpSolution([], 0.0)
    _check_fleet(problem)
    D = problem.distance_matrix()
    tour, last, parent = _held_karp(D, m)
    full = (1 << m) - 1
    load = [0] * (full + 1)
    for S in range(1, full + 1):
        low = S & -S
        load[S] = load[S ^ low] + problem.demands[low.bit_length() - 1]

    memo: dict[tuple[int, int], tuple[float, int]] = {}

    def best(S: int, k: int) -> float:
        if S == 0:
            return 0.0
        if k == 0:
            return math.inf
        key = (S, k)
        if key in memo:
            return memo[key][0]
        low = S & -S
        rest = S ^ low
        val, arg = math.inf, -1
        sub = rest
        while True:
            B = sub | low
            if load[B] <= problem.Q:
                cand = tour[B] + best(S ^ B, k - 1)
                if cand < val - 1e-12:
                    val, arg = cand, B
            if sub == 0:
                break
            sub = (sub - 1) & rest
        memo[key] = (val, arg)
        return val

    total = best(full, problem.K)
    routes = []
    S, k = full, problem.K
    while S:
        B = memo[(S, k)][1]
        routes.append(_unwind(B, last[B], parent))
        S ^= B
        k -= 1
    return VrpSolution(routes, solution_cost(routes, D) if math.isfinite(total) else total)
