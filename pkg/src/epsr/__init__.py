"""Benchmark toolkit for efficient perceptual single-image super-resolution."""

__version__ = "0.1.0"

from .archs import ModelSpec, build_model  # noqa: F401
from .efficiency import BudgetReport, audit, count_flops, count_params  # noqa: F401
from .graph import Layer, ModelGraph  # noqa: F401
