"""Benchmark registry, problem grid and sweep runner."""

from ncg_bench.bench.functions import REGISTRY, BenchmarkFunction, get_function
from ncg_bench.bench.runner import BenchRunner, SweepResult, run_sweep
from ncg_bench.bench.suite import ProblemInstance, full_grid, instantiate, list_functions

__all__ = [
    "REGISTRY",
    "BenchmarkFunction",
    "get_function",
    "BenchRunner",
    "SweepResult",
    "run_sweep",
    "ProblemInstance",
    "full_grid",
    "instantiate",
    "list_functions",
]
