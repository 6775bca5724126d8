"""ALNS solver for multi-trip multi-barge drop-and-pull tugboat scheduling."""

from .construction import construct
from .engine import SearchConfig, SolveResult, solve, solve_multistart
from .evaluation import LossBreakdown, Schedule, loss, propagate
from .model import Instance, PenaltyConfig, build_instance, load_instance, save_instance
from .solution import RouteElement, Solution
from .validator import Violation, is_feasible, validate

__all__ = [
    "Instance", "PenaltyConfig", "build_instance", "load_instance", "save_instance",
    "RouteElement", "Solution", "LossBreakdown", "Schedule", "loss", "propagate",
    "Violation", "validate", "is_feasible", "construct", "SearchConfig", "SolveResult",
    "solve", "solve_multistart",
]

__version__ = "0.1.0"
