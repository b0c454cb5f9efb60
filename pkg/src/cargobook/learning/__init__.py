from .dataset import P_SCHEDULE, Dataset, generate_dataset
from .forest import ForestModel, fit_forest
from .surrogate import SurrogateCost, metrics, predict_cost, train_forest

__all__ = [
    "P_SCHEDULE",
    "Dataset",
    "ForestModel",
    "SurrogateCost",
    "fit_forest",
    "generate_dataset",
    "metrics",
    "predict_cost",
    "train_forest",
]
