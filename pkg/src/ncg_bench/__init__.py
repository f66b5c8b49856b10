"""
ncg-bench

Nonlinear conjugate gradient solvers with a strong Wolfe line search, a
scalable benchmark suite, Dolan-More performance profiles and an entity
tagging demo trained by the solvers.
"""

__version__ = "0.1.0"

from ncg_bench.bench.runner import BenchRunner, SweepResult
from ncg_bench.bench.suite import full_grid, instantiate

# Codegen module exports
from ncg_bench.codegen import (
    ConfigGenerator,
    ManifestGenerator,
    ProfileGenerator,
    RunManifest,
    TraceGenerator,
)
from ncg_bench.core.objective import EvalCounters, ObjectiveProblem
from ncg_bench.core.solver import (
    Method,
    SolveResult,
    Solver,
    SolverConfig,
    SolveStatus,
    solve,
    solve_traced,
)
from ncg_bench.core.validators import StepAuditor, TraceValidator
from ncg_bench.profiles.performance import Metric, RunTable, performance_ratios, profile_curve

__all__ = [
    # Core
    "ObjectiveProblem",
    "EvalCounters",
    "Method",
    "SolverConfig",
    "SolveResult",
    "SolveStatus",
    "Solver",
    "solve",
    "solve_traced",
    "StepAuditor",
    "TraceValidator",
    # Benchmarks and profiles
    "BenchRunner",
    "SweepResult",
    "full_grid",
    "instantiate",
    "Metric",
    "RunTable",
    "performance_ratios",
    "profile_curve",
    # Codegen
    "ConfigGenerator",
    "ManifestGenerator",
    "ProfileGenerator",
    "RunManifest",
    "TraceGenerator",
]
