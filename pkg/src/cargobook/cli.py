"""Command-line entry point: ``cargobook <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bench import evaluate, export, format_summary
from .instance import FAMILIES, build_family, load_instance, save_instance
from .learning import Dataset, ForestModel, SurrogateCost, generate_dataset, metrics, train_forest
from .policies import DPPolicy, MCTSPolicy, RandPolicy, SarsaPolicy, ValueTable, dp_solve, sarsa_train
from .routing import ExactCost, operational_cost, split_demands
from .simulator import generate_realizations, load_realizations, save_realizations

log = logging.getLogger("cargobook")

WORKERS_ENV = "CARGOBOOK_WORKERS"


class CliError(Exception):
    pass


def worker_cap(requested: int | None) -> int:
    """Worker count, limited by the CARGOBOOK_WORKERS environment variable when set."""
    n = requested if requested else (os.cpu_count() or 1)
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise CliError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from exc
    return max(1, n)


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _check_model(model: ForestModel, spec) -> None:
    owner = model.provenance.get("dataset", {}).get("instance")
    if owner is not None and owner != spec.digest():
        raise CliError(f"forest was trained on instance {owner}, not {spec.digest()}")


def _surrogate(args, spec) -> SurrogateCost:
    if not args.model:
        raise CliError("this command needs --model (a trained forest)")
    model = ForestModel.load(args.model)
    _check_model(model, spec)
    return SurrogateCost(model, spec)


# commands


def cmd_gen_instance(args):
    spec = build_family(args.family, args.seed)
    save_instance(spec, args.out)
    print(f"instance family={spec.family} n={spec.n} T={spec.T} Q={spec.Q} digest={spec.digest()} -> {args.out}")


def cmd_gen_realizations(args):
    spec = load_instance(args.instance)
    real = generate_realizations(spec, args.count, args.seed)
    save_realizations(args.out, spec, real, args.seed)
    print(f"{len(real)} realizations (seed {args.seed}) -> {args.out}")


def cmd_gen_data(args):
    spec = load_instance(args.instance)
    data = generate_dataset(spec, args.size, args.seed)
    data.save(args.out)
    print(f"{len(data)} samples, {data.provenance['distinct_states']} distinct states -> {args.out}")


def cmd_train_rf(args):
    data = Dataset.load(args.data)
    model = train_forest(data, tree_count=args.trees, seed=args.seed, n_jobs=worker_cap(args.jobs))
    model.save(args.out)
    mse, mae = metrics(model, *data.test)
    print(f"forest: {model.tree_count} trees, {model.node_count} nodes; test MSE {mse:.4f} MAE {mae:.4f} -> {args.out}")


def cmd_eval_rf(args):
    model = ForestModel.load(args.model)
    data = Dataset.load(args.data)
    split = data.train if args.split == "train" else data.test
    mse, mae = metrics(model, *split)
    doc = {"split": args.split, "size": int(len(split[1])), "mse": mse, "mae": mae,
           "model": model.provenance, "dataset": data.provenance}
    if args.out:
        _write_json(args.out, doc)
    print(f"{args.split} split ({len(split[1])} samples): MSE {mse:.4f} MAE {mae:.4f}")


def cmd_dp_solve(args):
    spec = load_instance(args.instance)
    terminal = ExactCost(spec) if args.terminal == "exact" else _surrogate(args, spec)
    start = time.perf_counter()
    table = dp_solve(spec, terminal, terminal_kind=args.terminal)
    table.save(args.out)
    V1 = table[1, (0,) * spec.n]
    print(f"V_1(0) = {V1:.6f} ({args.terminal} terminal, {time.perf_counter() - start:.1f}s) -> {args.out}")


def cmd_train_sarsa(args):
    spec = load_instance(args.instance)
    terminal = _surrogate(args, spec)
    validation = load_realizations(args.validation, spec) if args.validation else None
    policy = sarsa_train(spec, terminal, episodes=args.episodes, epsilon=args.epsilon,
                         hidden_dim=args.hidden_dim, lr=args.lr, eval_every=args.eval_every,
                         validation=validation, seed=args.seed)
    policy.save(args.out)
    prov = policy.provenance
    print(f"best validation profit {prov['best_validation_profit']:.3f} at episode {prov['best_episode']} -> {args.out}")


def _cached(cache: dict, key: str, factory):
    if key not in cache:
        cache[key] = factory()
    return cache[key]


def _parse_methods(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    if not methods:
        raise CliError("--methods is empty")
    return methods


def _build_method(name, args, spec, exact, cache):
    if name in ("dp-exact", "dp-ml"):
        kind = "exact" if name == "dp-exact" else "ml"
        path = args.dp_exact_table if kind == "exact" else args.dp_ml_table
        start = time.perf_counter()
        if path:
            table = ValueTable.load(path, spec)
        else:
            terminal = exact if kind == "exact" else _cached(cache, "surrogate", lambda: _surrogate(args, spec))
            table = dp_solve(spec, terminal, terminal_kind=kind)
        policy = DPPolicy(table)
        policy.offline_seconds = time.perf_counter() - start
        policy.provenance = {"instance": spec.digest(), "terminal": kind, "table": path}
        return policy
    if name == "sarsa":
        if not args.sarsa:
            raise CliError("method sarsa needs --sarsa (a trained policy file)")
        return _cached(cache, "sarsa", lambda: SarsaPolicy.load(args.sarsa, spec))
    if name.startswith("rand-"):
        try:
            p = float(name[5:])
        except ValueError as exc:
            raise CliError(f"bad method {name!r}; expected rand-P with P in [0, 1]") from exc
        return RandPolicy(p, args.seed)
    if name == "mcts" or name.startswith("mcts-"):
        parts = name.split("-")
        base, sims = args.base, args.simulations
        if len(parts) == 3:
            base = parts[1]
            try:
                sims = int(parts[2])
            except ValueError as exc:
                raise CliError(f"bad method {name!r}; expected mcts-BASE-X") from exc
        elif len(parts) != 1:
            raise CliError(f"bad method {name!r}; expected mcts or mcts-BASE-X")
        if base not in ("rand", "sarsa"):
            raise CliError(f"unknown MCTS base policy {base!r}")
        base_policy = None
        if base == "sarsa":
            if not args.sarsa:
                raise CliError(f"method {name} needs --sarsa")
            base_policy = _cached(cache, "sarsa", lambda: SarsaPolicy.load(args.sarsa, spec))
        terminal = _cached(cache, "surrogate", lambda: _surrogate(args, spec))
        policy = MCTSPolicy(spec, terminal, simulations=sims, c=args.uct_c, base=base,
                            base_policy=base_policy, seed=args.seed)
        policy.provenance = {"instance": spec.digest()}
        return policy
    raise CliError(f"unknown method {name!r}")


def cmd_evaluate(args):
    spec = load_instance(args.instance)
    real = load_realizations(args.realizations, spec)
    exact = ExactCost(spec)
    cache: dict = {}
    methods = [(m, _build_method(m, args, spec, exact, cache)) for m in _parse_methods(args.methods)]
    report = evaluate(spec, methods, real, exact=exact, seed=args.seed)
    paths = export(report, args.out, stem=args.stem, timings=args.timings)
    print(format_summary(report))
    print("wrote " + ", ".join(str(p) for p in paths))


def cmd_route(args):
    spec = load_instance(args.instance)
    try:
        w = tuple(int(x) for x in args.state.split(","))
    except ValueError as exc:
        raise CliError(f"--state must be comma-separated integers, got {args.state!r}") from exc
    cost = operational_cost(w, spec)
    # solver customers are split demand items; report 1-based location ids
    owner = [j + 1 for j, _ in split_demands(w, spec.Q)]
    routes = [[owner[c - 1] for c in route] for route in cost.solution.routes]
    doc = {"instance": spec.digest(), "state": list(w), "gamma": cost.gamma, "z_star": cost.z_star,
           "K": cost.K, "outsourced": cost.outsourced, "routes": routes}
    if args.out:
        _write_json(args.out, doc)
    print(json.dumps(doc, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cargobook", description="Booking control for last-mile cargo delivery.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.set_defaults(func=func)
        return p

    p = add("gen-instance", cmd_gen_instance, "build a benchmark instance")
    p.add_argument("--family", type=int, choices=FAMILIES, required=True)
    p.add_argument("--out", required=True)

    p = add("gen-realizations", cmd_gen_realizations, "sample shared demand realizations")
    p.add_argument("--instance", required=True)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--out", required=True)

    p = add("gen-data", cmd_gen_data, "simulate and label terminal states for the surrogate")
    p.add_argument("--instance", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("train-rf", cmd_train_rf, "fit the random forest surrogate")
    p.add_argument("--data", required=True)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1, help=f"worker processes (capped by ${WORKERS_ENV})")
    p.add_argument("--out", required=True)

    p = add("eval-rf", cmd_eval_rf, "report surrogate MSE/MAE on a dataset split")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--out")

    p = add("dp-solve", cmd_dp_solve, "backward induction value table")
    p.add_argument("--instance", required=True)
    p.add_argument("--terminal", choices=("exact", "ml"), default="exact")
    p.add_argument("--model", help="forest file, for --terminal ml")
    p.add_argument("--out", required=True)

    p = add("train-sarsa", cmd_train_sarsa, "train a SARSA policy against the surrogate")
    p.add_argument("--instance", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--episodes", type=int, default=25_000)
    p.add_argument("--epsilon", type=float, default=0.10)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--eval-every", type=int, default=100)
    p.add_argument("--validation", help="realization file used for checkpoint selection")
    p.add_argument("--out", required=True)

    p = add("evaluate", cmd_evaluate, "paired evaluation of policies")
    p.add_argument("--instance", required=True)
    p.add_argument("--realizations", required=True)
    p.add_argument("--methods", required=True,
                   help="comma list of dp-exact, dp-ml, sarsa, mcts, mcts-rand-X, mcts-sarsa-X, rand-P")
    p.add_argument("--model", help="forest file (dp-ml, mcts)")
    p.add_argument("--sarsa", help="SARSA policy file (sarsa, mcts-sarsa-X)")
    p.add_argument("--dp-exact-table")
    p.add_argument("--dp-ml-table")
    p.add_argument("--simulations", type=int, default=30, help="for plain 'mcts'")
    p.add_argument("--base", choices=("rand", "sarsa"), default="rand", help="for plain 'mcts'")
    p.add_argument("--uct-c", type=float, help="exploration constant (default: per-family table)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--stem", default="report")
    p.add_argument("--timings", action="store_true", help="include wall-clock times in the results file")

    p = add("route", cmd_route, "operational cost and routes for one state")
    p.add_argument("--instance", required=True)
    p.add_argument("--state", required=True, help="accepted counts, e.g. 1,0,2,3")
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (CliError, FileNotFoundError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"cargobook {args.command}: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
