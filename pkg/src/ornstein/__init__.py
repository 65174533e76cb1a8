"""Riesz-product witnesses for Ornstein-type L1 non-inequalities on the 2-torus."""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
