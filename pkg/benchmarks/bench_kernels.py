"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--trees 100] [--repeat 5]

Workloads mirror the hot loops: batch forest scoring (DP-ML terminal layer),
single-state forest scoring (SARSA validation, MCTS leaves) and rand-p rollouts
(MCTS simulations). Outputs of the two backends are also checked for equality.
"""

import argparse
import timeit

import numpy as np

from cargobook.instance import arrival_table, build_family
from cargobook.kernels import load_backend
from cargobook.learning import fit_forest


def workloads(trees, seed):
    rng = np.random.default_rng(seed)
    spec = build_family(10, 0)
    dim = spec.n + 17
    X = rng.normal(size=(2000, dim))
    y = X[:, :5].sum(axis=1) + rng.normal(scale=0.1, size=2000)
    arrays = fit_forest(X, y, tree_count=trees, seed=seed)._arrays()
    lists = [a.tolist() for a in arrays]
    Z = rng.normal(size=(5000, dim))
    rows = Z[:500].tolist()
    cum = arrival_table(spec).cumulative
    rev = np.asarray(spec.revenues)
    u = rng.random((2000, 2 * spec.T))

    def batch(k, python):
        return k.forest_predict(*arrays, Z)

    # the Python scalar path is fed lists, as the library does
    def single(k, python):
        args = lists if python else arrays
        src = rows if python else Z[:500]
        return [k.forest_predict_one(*args, z) for z in src]

    def rollouts(k, python):
        out = []
        for row in u:
            w = np.zeros(spec.n, dtype=np.int64)
            out.append(k.random_rollout(cum, rev, 1, w, 0.1, row))
        return out

    return {
        "forest_predict (5000 rows)": batch,
        "forest_predict_one (500 calls)": single,
        "random_rollout (2000 episodes)": rollouts,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trees", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    py = load_backend("python")
    try:
        c = load_backend("c")
    except ImportError:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return 1

    print(f"{'kernel':<32}{'C ms':>10}{'Python ms':>12}{'speedup':>10}")
    for name, run in workloads(args.trees, args.seed).items():
        if not np.array_equal(np.asarray(run(c, False)), np.asarray(run(py, True))):
            raise SystemExit(f"{name}: backends disagree")
        t_c = min(timeit.repeat(lambda: run(c, False), number=1, repeat=args.repeat))
        t_py = min(timeit.repeat(lambda: run(py, True), number=1, repeat=args.repeat))
        print(f"{name:<32}{1e3 * t_c:>10.2f}{1e3 * t_py:>12.2f}{t_py / t_c:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
