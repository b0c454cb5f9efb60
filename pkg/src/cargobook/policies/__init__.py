from .base import ConstantPolicy, Policy, RandPolicy, rand_p_decide
from .dp import DPPolicy, StateSpaceTooLarge, ValueTable, dp_decide, dp_solve
from .mcts import MCTSPolicy, SearchTree, mcts_decide, uct_select
from .mlp import QNetwork, mlp_forward, mlp_train_step
from .sarsa import SarsaPolicy, sarsa_train

__all__ = [
    "ConstantPolicy",
    "DPPolicy",
    "MCTSPolicy",
    "Policy",
    "QNetwork",
    "RandPolicy",
    "SarsaPolicy",
    "SearchTree",
    "StateSpaceTooLarge",
    "ValueTable",
    "dp_decide",
    "dp_solve",
    "mcts_decide",
    "mlp_forward",
    "mlp_train_step",
    "rand_p_decide",
    "sarsa_train",
    "uct_select",
]
