"""
Strong Wolfe-Powell line search.

Bracket phase with step doubling followed by a zoom phase using safeguarded
cubic (Hermite) interpolation with a bisection fallback. Every trial costs
one objective and one gradient evaluation.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ncg_bench.core.objective import (
    EvalCounters,
    NonFiniteValue,
    ObjectiveProblem,
    Vector,
    evaluate,
    gradient,
)

logger = logging.getLogger(__name__)

# interpolated trial steps are kept inside [lo + 10%, hi - 10%] of the bracket
_INTERIOR = 0.1


@dataclass(frozen=True)
class WolfeParams:
    """Parameters of the strong Wolfe-Powell conditions.

    Attributes:
        delta: Sufficient-decrease coefficient, in (0, 0.5).
        sigma: Curvature coefficient, in (delta, 1).
        max_evals: Trial-step budget per search.
        alpha_max: Upper bound on trial steps.
        refine: Try one secant step on phi' through 0 and an accepted step
                whose |phi'(alpha)| is still above refine_ratio * |phi'(0)|.
        refine_ratio: Threshold for the refinement step.
    """

    delta: float = 1e-4
    sigma: float = 0.9
    max_evals: int = 60
    alpha_max: float = 1e6
    refine: bool = True
    refine_ratio: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 0.5), got {self.delta}")
        if not self.delta < self.sigma < 1.0:
            raise ValueError(f"sigma must lie in (delta, 1), got {self.sigma}")
        if self.max_evals < 1:
            raise ValueError(f"max_evals must be >= 1, got {self.max_evals}")
        if not self.alpha_max > 0:
            raise ValueError(f"alpha_max must be positive, got {self.alpha_max}")
        if not 0.0 < self.refine_ratio < 1.0:
            raise ValueError(f"refine_ratio must lie in (0, 1), got {self.refine_ratio}")


class LineSearchStatus(Enum):
    """Terminal status of a line search."""

    CONVERGED = "converged"
    MAX_EVALS = "max_evals"
    NON_DESCENT = "non_descent"
    NON_FINITE = "non_finite"


@dataclass
class LineSearchResult:
    """Result of a line search.

    Attributes:
        alpha: Accepted step (on failure: best step with sufficient decrease, or 0).
        f_new: f(x + alpha d).
        g_new: grad f(x + alpha d).
        evals_used: Number of trial steps evaluated.
        status: Terminal status.
        x_new: The point x + alpha d exactly as evaluated.
    """

    alpha: float
    f_new: float
    g_new: Vector
    evals_used: int
    status: LineSearchStatus
    x_new: Optional[Vector] = None

    @property
    def converged(self) -> bool:
        return self.status is LineSearchStatus.CONVERGED


@dataclass
class _Trial:
    alpha: float
    phi: float
    dphi: float
    x: Optional[Vector]
    g: Optional[Vector]

    @property
    def finite(self) -> bool:
        return np.isfinite(self.phi)


def satisfies_strong_wolfe(
    f0: float, dphi0: float, alpha: float, phi: float, dphi: float, delta: float, sigma: float
) -> Tuple[bool, bool]:
    """Evaluate both strong Wolfe inequalities.

    Returns:
        (sufficient_decrease, curvature) as plain booleans.
    """
    sufficient = phi <= f0 + delta * alpha * dphi0
    curvature = abs(dphi) <= sigma * abs(dphi0)
    return bool(sufficient), bool(curvature)


def _hermite_min(lo: _Trial, hi: _Trial) -> Optional[float]:
    """Minimizer of the cubic matching phi and phi' at both bracket ends."""
    if not (lo.finite and hi.finite and np.isfinite(hi.dphi)):
        return None
    width = hi.alpha - lo.alpha
    if width == 0:
        return None
    d1 = lo.dphi + hi.dphi - 3.0 * (lo.phi - hi.phi) / (lo.alpha - hi.alpha)
    radicand = d1 * d1 - lo.dphi * hi.dphi
    if radicand < 0:
        return None
    d2 = np.copysign(np.sqrt(radicand), width)
    denom = hi.dphi - lo.dphi + 2.0 * d2
    if denom == 0:
        return None
    alpha = hi.alpha - width * (hi.dphi + d2 - d1) / denom
    if not np.isfinite(alpha):
        return None
    return float(alpha)


class _Search:
    """State of one strong Wolfe search along x + alpha d."""

    def __init__(
        self,
        problem: ObjectiveProblem,
        x: Vector,
        d: Vector,
        f0: float,
        dphi0: float,
        params: WolfeParams,
        counters: Optional[EvalCounters],
    ):
        self.problem = problem
        self.x = x
        self.d = d
        self.f0 = f0
        self.dphi0 = dphi0
        self.params = params
        self.counters = counters
        self.evals = 0
        self.finite_seen = False

    @property
    def budget_left(self) -> bool:
        return self.evals < self.params.max_evals

    def try_step(self, alpha: float) -> _Trial:
        self.evals += 1
        x_new = self.x + alpha * self.d
        try:
            phi = evaluate(self.problem, x_new, self.counters)
            g_new = gradient(self.problem, x_new, self.counters)
        except NonFiniteValue:
            return _Trial(alpha, np.inf, np.nan, None, None)
        self.finite_seen = True
        return _Trial(alpha, phi, float(np.dot(g_new, self.d)), x_new, g_new)

    def wolfe(self, trial: _Trial) -> Tuple[bool, bool]:
        return satisfies_strong_wolfe(
            self.f0,
            self.dphi0,
            trial.alpha,
            trial.phi,
            trial.dphi,
            self.params.delta,
            self.params.sigma,
        )

    def accept(self, trial: _Trial) -> LineSearchResult:
        trial = self.refine(trial)
        return LineSearchResult(
            alpha=trial.alpha,
            f_new=trial.phi,
            g_new=trial.g,
            evals_used=self.evals,
            status=LineSearchStatus.CONVERGED,
            x_new=trial.x,
        )

    def fail(self, best: _Trial, g0: Vector) -> LineSearchResult:
        status = LineSearchStatus.MAX_EVALS if self.finite_seen else LineSearchStatus.NON_FINITE
        logger.debug(
            "line search on '%s' failed (%s) after %d trials, best alpha=%.3e",
            self.problem.name,
            status.value,
            self.evals,
            best.alpha,
        )
        if best.alpha == 0.0 or best.g is None:
            return LineSearchResult(0.0, self.f0, g0, self.evals, status, self.x)
        return LineSearchResult(best.alpha, best.phi, best.g, self.evals, status, best.x)

    def refine(self, accepted: _Trial) -> _Trial:
        """Secant step on phi' through (0, phi'(0)) and an accepted trial."""
        params = self.params
        if not params.refine or not self.budget_left:
            return accepted
        if abs(accepted.dphi) <= params.refine_ratio * abs(self.dphi0):
            return accepted
        curvature = accepted.dphi - self.dphi0
        if not curvature > 0:
            return accepted
        alpha = accepted.alpha * (-self.dphi0) / curvature
        if not (np.isfinite(alpha) and 0.0 < alpha <= params.alpha_max):
            return accepted
        if abs(alpha - accepted.alpha) <= 1e-6 * accepted.alpha:
            return accepted
        trial = self.try_step(alpha)
        if not trial.finite or trial.phi > accepted.phi:
            return accepted
        sufficient, curvature_ok = self.wolfe(trial)
        return trial if sufficient and curvature_ok else accepted

    def zoom(self, lo: _Trial, hi: _Trial, g0: Vector) -> LineSearchResult:
        """Shrink [lo, hi] until a strong Wolfe step is found.

        Invariants: lo satisfies sufficient decrease and has the lowest phi
        seen so far; phi'(lo) * (hi - lo) < 0.
        """
        while self.budget_left:
            width = hi.alpha - lo.alpha
            if abs(width) <= np.finfo(float).eps * max(1.0, abs(lo.alpha)):
                break
            left, right = min(lo.alpha, hi.alpha), max(lo.alpha, hi.alpha)
            guard = _INTERIOR * (right - left)
            alpha = _hermite_min(lo, hi)
            if alpha is None:
                alpha = lo.alpha + 0.5 * width
            alpha = min(max(alpha, left + guard), right - guard)

            trial = self.try_step(alpha)
            if not trial.finite:
                hi = trial
                continue
            sufficient, curvature = self.wolfe(trial)
            if not sufficient or trial.phi >= lo.phi:
                hi = trial
                continue
            if curvature:
                return self.accept(trial)
            if trial.dphi * (hi.alpha - lo.alpha) >= 0:
                hi = lo
            lo = trial
        return self.fail(lo, g0)


def strong_wolfe_search(
    problem: ObjectiveProblem,
    x: Vector,
    d: Vector,
    f0: float,
    g0: Vector,
    alpha_init: float,
    params: Optional[WolfeParams] = None,
    counters: Optional[EvalCounters] = None,
) -> LineSearchResult:
    """Find a step satisfying the strong Wolfe-Powell conditions.

    f(x + a d) <= f0 + delta * a * g0'd   and   |g(x + a d)'d| <= sigma * |g0'd|

    Args:
        problem: The objective.
        x: Current point.
        d: Search direction; must satisfy g0'd < 0.
        f0: f(x).
        g0: grad f(x).
        alpha_init: First trial step (> 0).
        params: Wolfe parameters (defaults: delta=1e-4, sigma=0.9).
        counters: Per-solve evaluation counters.

    Returns:
        LineSearchResult. NON_DESCENT is returned without any evaluation when
        g0'd >= 0; MAX_EVALS when the budget is exhausted; NON_FINITE when no
        trial produced finite values.
    """
    params = params or WolfeParams()
    if not alpha_init > 0:
        raise ValueError(f"alpha_init must be positive, got {alpha_init}")
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    dphi0 = float(np.dot(g0, d))
    if not dphi0 < 0:
        return LineSearchResult(0.0, f0, g0, 0, LineSearchStatus.NON_DESCENT, x)

    search = _Search(problem, x, d, f0, dphi0, params, counters)
    prev = _Trial(0.0, f0, dphi0, x, g0)
    alpha = min(alpha_init, params.alpha_max)

    while search.budget_left:
        trial = search.try_step(alpha)
        if not trial.finite:
            return search.zoom(prev, trial, g0)
        sufficient, curvature = search.wolfe(trial)
        if not sufficient or (search.evals > 1 and trial.phi >= prev.phi):
            return search.zoom(prev, trial, g0)
        if curvature:
            return search.accept(trial)
        if trial.dphi >= 0:
            return search.zoom(trial, prev, g0)
        if alpha >= params.alpha_max:
            return search.fail(trial, g0)
        prev = trial
        alpha = min(2.0 * alpha, params.alpha_max)
    return search.fail(prev, g0)
