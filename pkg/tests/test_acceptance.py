"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is echoed in the terminal summary.
Seeds are fixed up front: instance 0, dataset 1, forest 2, SARSA 3,
realizations 99, evaluation 0.
"""

import itertools
import os
import time

import numpy as np
import pytest

from cargobook.bench import evaluate, gaps_to_best
from cargobook.cli import main as cli_main
from cargobook.instance import arrival_table, build_family
from cargobook.learning import P_SCHEDULE, SurrogateCost, generate_dataset, metrics, train_forest
from cargobook.policies import (
    DPPolicy, MCTSPolicy, QNetwork, RandPolicy, dp_decide, dp_solve, mcts_decide, sarsa_train,
)
from cargobook.routing import ExactCost, RoutingProblem, exact_cvrp, min_bins, solve_cvrp
from cargobook.simulator import BookingState, generate_realizations
from conftest import ACCEPTANCE_LINES, micro_spec, random_micro
from oracles import bellman_rhs, brute_cvrp, brute_min_bins, expectimax_value, numeric_grads

pytestmark = pytest.mark.slow

SEEDS = dict(instance=0, data=1, forest=2, sarsa=3, realizations=99, evaluation=0)


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def family4():
    """The full family-4 pipeline, timed for criterion 10."""
    start = time.perf_counter()
    spec = build_family(4, SEEDS["instance"])
    data = generate_dataset(spec, 1250, SEEDS["data"])
    model = train_forest(data, tree_count=100, seed=SEEDS["forest"])
    surrogate = SurrogateCost(model, spec)
    exact = ExactCost(spec)
    real = generate_realizations(spec, 50, SEEDS["realizations"])
    methods = [
        ("dp-exact", DPPolicy(dp_solve(spec, exact, "exact"))),
        ("dp-ml", DPPolicy(dp_solve(spec, surrogate, "ml"))),
        ("mcts-rand-30", MCTSPolicy(spec, surrogate, simulations=30)),
        ("rand-0.6", RandPolicy(0.6)),
    ]
    report = evaluate(spec, methods, real, exact=exact, seed=SEEDS["evaluation"])
    elapsed = time.perf_counter() - start
    return dict(spec=spec, data=data, model=model, surrogate=surrogate, exact=exact, real=real,
                report=report, elapsed=elapsed)


@pytest.fixture(scope="module")
def family10():
    start = time.perf_counter()
    spec = build_family(10, SEEDS["instance"])
    data = generate_dataset(spec, 2500, SEEDS["data"])
    model = train_forest(data, tree_count=100, seed=SEEDS["forest"])
    return dict(spec=spec, data=data, model=model, elapsed=time.perf_counter() - start)


def test_criterion_01_surrogate_quality(family4, family10):
    mse4, mae4 = metrics(family4["model"], *family4["data"].test)
    _, mae10 = metrics(family10["model"], *family10["data"].test)
    ok = mae4 <= 2.5 and mse4 <= 12 and mae10 <= 5.6 and family10["elapsed"] <= 900
    record(1, ok, f"family 4 test MAE {mae4:.3f} (<=2.5) MSE {mse4:.3f} (<=12); "
                  f"family 10 test MAE {mae10:.3f} (<=5.6); family 10 build {family10['elapsed']:.0f}s")


def test_criterion_02_dp_ml_close_to_dp_exact(family4):
    rep = family4["report"]
    means = rep.mean_profit
    idx = [rep.methods.index(m) for m in ("dp-exact", "dp-ml", "rand-0.6")]
    gaps = gaps_to_best(rep.profits[idx])
    shortfall = (means["dp-exact"] - means["dp-ml"]) / abs(means["dp-exact"])
    median_gap = float(np.median(gaps[0]))
    ok = shortfall <= 0.03 and median_gap == 0.0
    record(2, ok, f"DP-Exact {means['dp-exact']:.2f}, DP-ML {means['dp-ml']:.2f} "
                  f"(shortfall {100 * shortfall:.2f}% <= 3%); DP-Exact median gap {median_gap:.2f}%")


def test_criterion_03_policy_ordering(family4, family10):
    # family 10: MCTS-rand-100 against every rand-p of the data schedule
    spec10 = family10["spec"]
    sur10 = SurrogateCost(family10["model"], spec10)
    real10 = generate_realizations(spec10, 50, SEEDS["realizations"])
    methods10 = [(f"rand-{p}", RandPolicy(p)) for p in P_SCHEDULE]
    methods10.append(("mcts-rand-100", MCTSPolicy(spec10, sur10, simulations=100)))
    rep10 = evaluate(spec10, methods10, real10, seed=SEEDS["evaluation"])
    m10 = rep10.mean_profit
    best_rand = max((v, k) for k, v in m10.items() if k.startswith("rand-"))
    lift = m10["mcts-rand-100"] / best_rand[0] - 1

    # family 4: every learned/search/DP variant beats rand-0.6
    spec4, sur4, exact4 = family4["spec"], family4["surrogate"], family4["exact"]
    sarsa = sarsa_train(spec4, sur4, seed=SEEDS["sarsa"])
    extra = [
        ("sarsa", sarsa),
        ("mcts-rand-100", MCTSPolicy(spec4, sur4, simulations=100)),
        ("mcts-sarsa-30", MCTSPolicy(spec4, sur4, simulations=30, base="sarsa", base_policy=sarsa)),
        ("mcts-sarsa-100", MCTSPolicy(spec4, sur4, simulations=100, base="sarsa", base_policy=sarsa)),
    ]
    rep4 = evaluate(spec4, extra, family4["real"], exact=exact4, seed=SEEDS["evaluation"])
    m4 = {**family4["report"].mean_profit, **rep4.mean_profit}
    baseline = m4.pop("rand-0.6")
    losers = [k for k, v in m4.items() if v <= baseline]
    ok = lift >= 0.15 and not losers
    f4_text = ", ".join(f"{k} {v:.2f}" for k, v in m4.items())
    record(3, ok, f"family 10: MCTS-rand-100 {m10['mcts-rand-100']:.2f} vs best {best_rand[1]} "
                  f"{best_rand[0]:.2f} (+{100 * lift:.1f}%, need +15%); "
                  f"family 4 vs rand-0.6 {baseline:.2f}: {f4_text}")


def test_criterion_04_dp_matches_expectimax():
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(50):
        spec = random_micro(rng, n_max=2, T_max=4)
        exact = ExactCost(spec)
        table = dp_solve(spec, exact, "exact")
        oracle = expectimax_value(arrival_table(spec).probs.tolist(), spec.revenues, spec.T, exact, spec.n)
        worst = max(worst, abs(table[1, (0,) * spec.n] - oracle))
    record(4, worst <= 1e-9, f"max |V_1 - expectimax| over 50 micro-instances = {worst:.2e} (<=1e-9)")


def _random_problem(rng, m_max):
    m = int(rng.integers(1, m_max + 1))
    Q = int(rng.integers(1, 7))
    demands = [int(d) for d in rng.integers(1, Q + 1, m)]
    K = int(rng.integers(min_bins(demands, Q), m + 1))
    pts = [tuple(p) for p in rng.uniform(0, 10, (m, 2))]
    return RoutingProblem(pts, demands, tuple(rng.uniform(0, 10, 2)), Q, K)


def test_criterion_05_routing_stack():
    rng = np.random.default_rng(505)
    exact_err = 0.0
    for _ in range(300):
        p = _random_problem(rng, 5)
        exact_err = max(exact_err, abs(exact_cvrp(p).cost - brute_cvrp(p.points, p.demands, p.depot, p.Q, p.K)))
    worst_ratio = 0.0
    for _ in range(200):
        p = _random_problem(rng, 7)
        worst_ratio = max(worst_ratio, solve_cvrp(p).cost / exact_cvrp(p).cost)
    mismatches = checked = 0
    for Q in range(1, 8):
        for k in range(13):
            for ms in itertools.combinations_with_replacement(range(1, Q + 1), k):
                checked += 1
                mismatches += min_bins(list(ms), Q) != brute_min_bins(ms, Q)
    ok = exact_err <= 1e-9 and worst_ratio <= 1.05 and mismatches == 0
    record(5, ok, f"exact vs brute force max error {exact_err:.1e} (300 cases, <=5 customers); "
                  f"heuristic/exact worst {worst_ratio:.4f} (200 cases, <=1.05); "
                  f"bin packing {checked - mismatches}/{checked} multisets agree")


def test_criterion_06_bellman_consistency(family4):
    spec = family4["spec"]
    table = dp_solve(spec, family4["exact"], "exact")
    probs = arrival_table(spec).probs
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(1000):
        t = int(rng.integers(1, spec.T + 1))
        states = list(table.values[t])
        w = states[int(rng.integers(len(states)))]
        worst = max(worst, abs(table[t, w] - bellman_rhs(probs[t - 1], spec.revenues, table.values[t + 1], w)))
    record(6, worst <= 1e-9, f"max Bellman residual over 1000 sampled states = {worst:.2e} (<=1e-9)")


def test_criterion_07_gradient_check():
    rng = np.random.default_rng(707)
    worst = 0.0
    for _ in range(100):
        d, h = int(rng.integers(2, 9)), int(rng.integers(2, 12))
        net = QNetwork(d, h, 1e-3, rng)
        x, y = rng.normal(size=d), float(rng.normal(scale=2))
        _, analytic = net.loss_and_grads(x, y)
        for a, n in zip(analytic, numeric_grads(net, x, y)):
            a, n = np.ravel(a), np.ravel(n)
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
            worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    record(7, worst <= 1e-4, f"max relative gradient error over 100 nets = {worst:.2e} (<=1e-4)")


def test_criterion_08_mcts_convergence(family4):
    spec = micro_spec()
    exact = ExactCost(spec)
    table = dp_solve(spec, exact, "exact")
    state = BookingState(1, (0,))
    target = dp_decide(table, state, 1)
    agree = sum(mcts_decide(state, 1, spec, exact, 1000, 1.0, np.random.default_rng(s)) == target
                for s in range(20))

    violations = []

    def check(tree):
        violations.extend(k for k, st in tree.nodes.items() if st[4] != st[0] + st[1])

    sims = 200
    mcts_decide(BookingState(5, (1, 1, 1, 0)), 3, family4["spec"], family4["surrogate"], sims, 1.0,
                np.random.default_rng(8), on_simulation=check)
    ok = agree == 20 and not violations
    record(8, ok, f"X=1000 agrees with DP on {agree}/20 seeds; "
                  f"visit conservation violations after {sims} instrumented simulations: {len(violations)}")


def _cli_pipeline(where):
    cwd = os.getcwd()
    os.chdir(where)
    try:
        cmds = [
            ["gen-instance", "--family", "4", "--seed", "7", "--out", "f4.json"],
            ["gen-realizations", "--instance", "f4.json", "--count", "10", "--seed", "7", "--out", "r.json"],
            ["gen-data", "--instance", "f4.json", "--size", "200", "--seed", "7", "--out", "d.csv"],
            ["train-rf", "--data", "d.csv", "--trees", "20", "--seed", "7", "--out", "m.json"],
            ["eval-rf", "--model", "m.json", "--data", "d.csv", "--seed", "7", "--out", "ev.json"],
            ["dp-solve", "--instance", "f4.json", "--terminal", "exact", "--seed", "7", "--out", "dpx.json"],
            ["dp-solve", "--instance", "f4.json", "--terminal", "ml", "--model", "m.json", "--seed", "7",
             "--out", "dpml.json"],
            ["train-sarsa", "--instance", "f4.json", "--model", "m.json", "--episodes", "300", "--seed", "7",
             "--out", "s.json"],
            ["evaluate", "--instance", "f4.json", "--realizations", "r.json", "--methods",
             "dp-exact,dp-ml,sarsa,mcts-rand-30,mcts-sarsa-30,rand-0.6", "--model", "m.json", "--sarsa", "s.json",
             "--dp-exact-table", "dpx.json", "--dp-ml-table", "dpml.json", "--seed", "7", "--out", "ev"],
            ["route", "--instance", "f4.json", "--state", "3,1,0,2", "--seed", "7", "--out", "route.json"],
        ]
        codes = [cli_main(c) for c in cmds]
    finally:
        os.chdir(cwd)
    files = {p.relative_to(where).as_posix(): p.read_bytes() for p in sorted(where.rglob("*")) if p.is_file()}
    return codes, files


def test_criterion_09_cli_determinism(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    codes_a, files_a = _cli_pipeline(tmp_path / "a")
    codes_b, files_b = _cli_pipeline(tmp_path / "b")
    differing = sorted(k for k in files_a if files_a[k] != files_b.get(k))
    ok = codes_a == codes_b == [0] * len(codes_a) and files_a.keys() == files_b.keys() and not differing
    record(9, ok, f"{len(codes_a)} commands, {len(files_a)} output files, differing: {differing or 'none'}")


def test_criterion_10_end_to_end_time(family4):
    rep = family4["report"]
    ok = family4["elapsed"] <= 1800 and len(rep.methods) == 4 and rep.profits.shape == (4, 50)
    record(10, ok, f"family-4 pipeline (data, forest, DP-Exact, DP-ML, MCTS-rand-30, rand-0.6, "
                   f"50 realizations) took {family4['elapsed']:.0f}s (<=1800s)")
