"""
Objective definitions and evaluation.

Provides the smooth unconstrained objective abstraction consumed by the
line search, the solver and the benchmark suite, together with per-solve
evaluation counters and a central-difference gradient checker.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Vector = np.ndarray


class ObjectiveError(Exception):
    """Base class for objective evaluation errors."""

    pass


class DimensionMismatch(ObjectiveError, ValueError):
    """A vector does not have the problem's dimension."""

    pass


class NonFiniteValue(ObjectiveError, ArithmeticError):
    """An objective or gradient evaluation produced NaN or +-inf."""

    pass


@dataclass(frozen=True)
class ObjectiveProblem:
    """A smooth objective f: R^n -> R with an analytic gradient.

    Attributes:
        name: Identifier used in reports.
        n: Dimension of the domain.
        x0: Standard start point (n entries).
        eval_f: Maps a vector to f(x).
        eval_g: Maps a vector to grad f(x) (n entries).

    Problems are immutable and may be shared across threads; evaluation
    counting lives in EvalCounters, one per solve.
    """

    name: str
    n: int
    x0: Vector
    eval_f: Callable[[Vector], float]
    eval_g: Callable[[Vector], Vector]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"Problem dimension must be positive, got {self.n}")
        x0 = np.array(self.x0, dtype=np.float64).reshape(-1)
        if x0.shape[0] != self.n:
            raise DimensionMismatch(
                f"Start point of '{self.name}' has {x0.shape[0]} entries, expected {self.n}"
            )
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)


@dataclass
class EvalCounters:
    """Per-solve evaluation counts."""

    f_evals: int = 0
    g_evals: int = 0

    def to_dict(self) -> dict:
        return {"f_evals": self.f_evals, "g_evals": self.g_evals}


def _as_point(problem: ObjectiveProblem, x: Vector) -> Vector:
    point = np.asarray(x, dtype=np.float64)
    if point.ndim != 1 or point.shape[0] != problem.n:
        raise DimensionMismatch(
            f"'{problem.name}' expects a vector of length {problem.n}, got shape {point.shape}"
        )
    return point


def evaluate(
    problem: ObjectiveProblem, x: Vector, counters: Optional[EvalCounters] = None
) -> float:
    """Evaluate f(x).

    Args:
        problem: The objective.
        x: Point of length n (not modified).
        counters: Per-solve counters; f_evals is incremented by one.

    Returns:
        f(x) as a finite float.

    Raises:
        DimensionMismatch: x has the wrong length.
        NonFiniteValue: f(x) is NaN or infinite.
    """
    point = _as_point(problem, x)
    if counters is not None:
        counters.f_evals += 1
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        value = float(problem.eval_f(point))
    if not np.isfinite(value):
        raise NonFiniteValue(f"f({problem.name}) evaluated to {value}")
    return value


def gradient(
    problem: ObjectiveProblem, x: Vector, counters: Optional[EvalCounters] = None
) -> Vector:
    """Evaluate grad f(x).

    Args:
        problem: The objective.
        x: Point of length n (not modified).
        counters: Per-solve counters; g_evals is incremented by one.

    Returns:
        A fresh float64 array of length n.

    Raises:
        DimensionMismatch: x or the returned gradient has the wrong length.
        NonFiniteValue: Some gradient entry is NaN or infinite.
    """
    point = _as_point(problem, x)
    if counters is not None:
        counters.g_evals += 1
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        grad = np.array(problem.eval_g(point), dtype=np.float64).reshape(-1)
    if grad.shape[0] != problem.n:
        raise DimensionMismatch(
            f"Gradient of '{problem.name}' has {grad.shape[0]} entries, expected {problem.n}"
        )
    if not np.all(np.isfinite(grad)):
        bad = int(np.sum(~np.isfinite(grad)))
        raise NonFiniteValue(f"grad f({problem.name}) has {bad} non-finite entries")
    return grad


def check_gradient(problem: ObjectiveProblem, x: Vector, h: float = 1e-6) -> float:
    """Compare the analytic gradient against central differences.

    Args:
        problem: The objective.
        x: Point at which to check (not modified).
        h: Central-difference step.

    Returns:
        max_i |fd_i - g_i| / (1 + |g_i|).

    Raises:
        ValueError: h is not positive.
        NonFiniteValue: Some evaluation is not finite.
    """
    if not h > 0:
        raise ValueError(f"Finite-difference step must be positive, got {h}")
    point = _as_point(problem, x)
    analytic = gradient(problem, point)
    shifted = point.copy()
    worst = 0.0
    for i in range(problem.n):
        shifted[i] = point[i] + h
        f_plus = evaluate(problem, shifted)
        shifted[i] = point[i] - h
        f_minus = evaluate(problem, shifted)
        shifted[i] = point[i]
        central = (f_plus - f_minus) / (2.0 * h)
        worst = max(worst, abs(central - analytic[i]) / (1.0 + abs(analytic[i])))
    return worst


def check_points(problem: ObjectiveProblem, count: int = 10, seed: int = 0, radius: float = 0.1):
    """Seeded sample points x0 + U(-radius, radius)^n for gradient checks."""
    rng = np.random.default_rng(seed)
    return [problem.x0 + rng.uniform(-radius, radius, problem.n) for _ in range(count)]
