"""Adaptive filtered schemes for first-order Hamilton-Jacobi equations."""

from .core import (
    ConfigurationError,
    Grid1D,
    NumericalBlowup,
    SolutionState,
    SolverConfig,
    TimeGrid,
)
from .engine import RunResult, SchemeChoice, af_step, basic_filtered_step, run, run_2d
from .experiments import REGISTRY, convergence, get_experiment

__all__ = [
    "ConfigurationError",
    "Grid1D",
    "NumericalBlowup",
    "REGISTRY",
    "RunResult",
    "SchemeChoice",
    "SolutionState",
    "SolverConfig",
    "TimeGrid",
    "af_step",
    "basic_filtered_step",
    "convergence",
    "get_experiment",
    "run",
    "run_2d",
]

__version__ = "0.1.0"
