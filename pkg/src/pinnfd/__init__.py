"""Finite-difference and physics-informed neural solvers for Poisson-type problems."""

__version__ = "0.1.0"

from .fdm import Method2D, MethodFip, solve_fip_fdm, solve_poisson_1d, solve_poisson_2d
from .metrics import ErrorSummary, convergence_order, error_summary, relative_l2
from .neural import NetworkArch, NetworkParams, forward, init_params
from .problems import PROBLEM_IDS, SourceMode, get_problem
from .training import (
    FipMode,
    TrainConfig,
    make_observations,
    train_fip,
    train_forward_pinn,
)

__all__ = [
    "__version__",
    "Method2D",
    "MethodFip",
    "solve_fip_fdm",
    "solve_poisson_1d",
    "solve_poisson_2d",
    "ErrorSummary",
    "convergence_order",
    "error_summary",
    "relative_l2",
    "NetworkArch",
    "NetworkParams",
    "forward",
    "init_params",
    "PROBLEM_IDS",
    "SourceMode",
    "get_problem",
    "FipMode",
    "TrainConfig",
    "make_observations",
    "train_fip",
    "train_forward_pinn",
]
