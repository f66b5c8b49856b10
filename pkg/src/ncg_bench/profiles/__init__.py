"""Dolan-More performance profiles."""

from ncg_bench.profiles.performance import (
    EmptyTable,
    Metric,
    ProfileCurve,
    RatioMatrix,
    RunCell,
    RunTable,
    default_tau_grid,
    performance_ratios,
    profile_curve,
    profile_curves,
)

__all__ = [
    "EmptyTable",
    "Metric",
    "ProfileCurve",
    "RatioMatrix",
    "RunCell",
    "RunTable",
    "default_tau_grid",
    "performance_ratios",
    "profile_curve",
    "profile_curves",
]
