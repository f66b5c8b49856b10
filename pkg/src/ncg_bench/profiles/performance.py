"""
Dolan-More performance profiles.

A RunTable holds one cell per (problem, solver). performance_ratios()
divides each solved cell's cost by the best cost on that problem
(unsolved cells get +inf), and profile_curve() turns one solver's column
into the step function rho(tau) = |{p : r(p, s) <= tau}| / |P|.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

# wall-time costs below this many milliseconds are raised to it
WALLTIME_FLOOR_MS = 1.0


class EmptyTable(ValueError):
    """The run table has no problem that can be profiled."""

    pass


class Metric(Enum):
    """Cost measure used for the ratios."""

    ITERATIONS = "iterations"
    FEVALS = "fevals"
    WALLTIME = "walltime"

    @property
    def title(self) -> str:
        return {
            Metric.ITERATIONS: "number of iterations",
            Metric.FEVALS: "number of function evaluations",
            Metric.WALLTIME: "execution time",
        }[self]


@dataclass
class RunCell:
    """Outcome of one solver on one problem.

    Attributes:
        problem: Instance id.
        solver: Solver label.
        solved: Whether the solve converged.
        iterations: Steps taken.
        f_evals: Objective evaluations.
        g_evals: Gradient evaluations.
        wall_time_ms: Wall time in milliseconds.
        status: Terminal status label.
        error: Exception text if the solve raised.
    """

    problem: str
    solver: str
    solved: bool
    iterations: int = 0
    f_evals: int = 0
    g_evals: int = 0
    wall_time_ms: float = 0.0
    status: str = ""
    error: Optional[str] = None

    def cost(self, metric: Metric) -> float:
        if metric is Metric.ITERATIONS:
            return float(max(self.iterations, 1))
        if metric is Metric.FEVALS:
            return float(max(self.f_evals, 1))
        return max(float(self.wall_time_ms), WALLTIME_FLOOR_MS)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if data["error"] is None:
            del data["error"]
        return data


@dataclass
class RunTable:
    """Rectangular (problem x solver) table of run outcomes."""

    problems: List[str]
    solvers: List[str]
    cells: List[RunCell] = field(default_factory=list)

    def __post_init__(self):
        self._index = {}
        for cell in self.cells:
            key = (cell.problem, cell.solver)
            if key in self._index:
                raise ValueError(f"Duplicate cell for {key}")
            self._index[key] = cell
        expected = {(p, s) for p in self.problems for s in self.solvers}
        if set(self._index) != expected:
            missing = sorted(expected - set(self._index))[:3]
            extra = sorted(set(self._index) - expected)[:3]
            raise ValueError(f"RunTable is not rectangular (missing {missing}, extra {extra})")

    def cell(self, problem: str, solver: str) -> RunCell:
        return self._index[(problem, solver)]

    def solved_count(self, solver: str) -> int:
        return sum(1 for p in self.problems if self.cell(p, solver).solved)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "problems": list(self.problems),
            "solvers": list(self.solvers),
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunTable":
        return cls(
            problems=list(data["problems"]),
            solvers=list(data["solvers"]),
            cells=[RunCell(**c) for c in data["cells"]],
        )

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunTable":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class RatioMatrix:
    """Performance ratios; rows follow ``problems``, columns follow ``solvers``."""

    problems: List[str]
    solvers: List[str]
    ratios: np.ndarray
    metric: Metric
    dropped: List[str] = field(default_factory=list)

    def column(self, solver: str) -> np.ndarray:
        return self.ratios[:, self.solvers.index(solver)]


@dataclass
class ProfileCurve:
    """Step function rho(tau) of one solver, sampled on a tau grid."""

    solver: str
    taus: np.ndarray
    rhos: np.ndarray

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.taus.tolist(), self.rhos.tolist()))


def default_tau_grid(points: int = 256, max_log2: float = 10.0) -> np.ndarray:
    """``points`` log2-spaced values on [1, 2**max_log2]."""
    return np.logspace(0.0, max_log2, points, base=2.0)


def performance_ratios(table: RunTable, metric: Union[Metric, str]) -> RatioMatrix:
    """Compute r(p, s) = cost(p, s) / min_s' cost(p, s').

    Unsolved cells get +inf; problems no solver solved are dropped (with a
    warning). Ties at the minimum all get ratio 1.

    Raises:
        EmptyTable: No solvers, or no problem solved by any solver.
    """
    metric = Metric(metric)
    if not table.solvers or not table.problems:
        raise EmptyTable("Run table has no problems or no solvers")

    kept, dropped, rows = [], [], []
    for problem in table.problems:
        costs = np.array(
            [
                table.cell(problem, s).cost(metric) if table.cell(problem, s).solved else np.inf
                for s in table.solvers
            ]
        )
        best = np.min(costs)
        if not np.isfinite(best):
            dropped.append(problem)
            continue
        kept.append(problem)
        rows.append(costs / best)

    if dropped:
        logger.warning(
            "dropping %d problem(s) solved by no solver: %s",
            len(dropped),
            ", ".join(dropped[:10]) + (" ..." if len(dropped) > 10 else ""),
        )
    if not kept:
        raise EmptyTable("No problem was solved by any solver")
    return RatioMatrix(kept, list(table.solvers), np.vstack(rows), metric, dropped)


def profile_curve(
    ratios: RatioMatrix, solver: str, tau_grid: Optional[Sequence[float]] = None
) -> ProfileCurve:
    """rho_s(tau) = |{p : r(p, s) <= tau}| / |P| on ``tau_grid``.

    Raises:
        ValueError: tau_grid is empty, unsorted, or does not start at 1.
    """
    taus = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=np.float64)
    if taus.size == 0 or taus[0] != 1.0 or np.any(np.diff(taus) < 0):
        raise ValueError("tau grid must be sorted and start at 1")
    column = np.sort(ratios.column(solver))
    counts = np.searchsorted(column, taus, side="right")
    return ProfileCurve(solver, taus, counts / float(column.size))


def profile_curves(
    ratios: RatioMatrix, tau_grid: Optional[Sequence[float]] = None
) -> List[ProfileCurve]:
    return [profile_curve(ratios, s, tau_grid) for s in ratios.solvers]
