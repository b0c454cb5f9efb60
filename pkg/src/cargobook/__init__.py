"""Booking control for last-mile cargo delivery with learned routing costs."""

__version__ = "0.1.0"

from .instance import InstanceSpec, build_family, load_instance, save_instance
from .kernels import BACKEND

__all__ = ["BACKEND", "InstanceSpec", "__version__", "build_family", "load_instance", "save_instance"]
