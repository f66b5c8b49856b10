"""Core module: objectives, line search, coefficient rules and the solver."""

from ncg_bench.core.directions import BetaInputs, BetaOutcome, HybridParams
from ncg_bench.core.linesearch import LineSearchResult, WolfeParams, strong_wolfe_search
from ncg_bench.core.objective import EvalCounters, ObjectiveProblem
from ncg_bench.core.solver import Method, SolveResult, Solver, SolverConfig, SolveStatus
from ncg_bench.core.validators import StepAuditor, TraceValidator

__all__ = [
    "BetaInputs",
    "BetaOutcome",
    "HybridParams",
    "LineSearchResult",
    "WolfeParams",
    "strong_wolfe_search",
    "EvalCounters",
    "ObjectiveProblem",
    "Method",
    "SolveResult",
    "Solver",
    "SolverConfig",
    "SolveStatus",
    "StepAuditor",
    "TraceValidator",
]
