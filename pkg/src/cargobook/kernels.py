"""Kernel backend selection.

The compiled extension is used when it has been built; set
``CARGOBOOK_PURE_PYTHON=1`` to force the pure-Python implementation.
"""

import importlib
import os


def load_backend(name: str | None = None):
    """Return the kernel module for ``"c"``, ``"python"``, or the best available (``None``)."""
    if name == "python":
        return importlib.import_module("cargobook._pykernels")
    if name == "c":
        return importlib.import_module("cargobook._ckernels")
    if os.environ.get("CARGOBOOK_PURE_PYTHON"):
        return load_backend("python")
    try:
        return load_backend("c")
    except ImportError:
        return load_backend("python")


_impl = load_backend()
BACKEND = "c" if _impl.__name__.endswith("_ckernels") else "python"

forest_predict = _impl.forest_predict
forest_predict_one = _impl.forest_predict_one
random_rollout = _impl.random_rollout
