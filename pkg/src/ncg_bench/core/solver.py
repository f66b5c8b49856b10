"""
Nonlinear conjugate gradient solver.

Implements the iteration

    x_{k+1} = x_k + alpha_k d_k,   d_{k+1} = -g_{k+1} + beta_k d_k

with a strong Wolfe step, a selectable coefficient rule (FR, PRP, HS, HRM,
NHS, the AWHM hybrid, or steepest descent), the restart test
|g_{k+1}'g_k| >= nu ||g_{k+1}||^2 and the trial-step recurrence
lambda_{k+1} = alpha_k ||d_k|| / ||d_{k+1}|| seeded with 1 / ||g_0||.
"""

import logging
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

from ncg_bench.core.directions import (
    BetaBranch,
    BetaInputs,
    BetaOutcome,
    HybridParams,
    compute_beta,
    direction,
    restart_check,
)
from ncg_bench.core.linesearch import (
    LineSearchResult,
    LineSearchStatus,
    WolfeParams,
    strong_wolfe_search,
)
from ncg_bench.core.objective import (
    DimensionMismatch,
    EvalCounters,
    NonFiniteValue,
    ObjectiveProblem,
    Vector,
    evaluate,
    gradient,
)

logger = logging.getLogger(__name__)

# trial-step shrink factor after a search that saw only non-finite values
_NON_FINITE_SHRINK = 0.1


class Method(Enum):
    """Coefficient rule selector."""

    FR = "fr"
    PRP = "prp"
    HS = "hs"
    HRM = "hrm"
    NHS = "nhs"
    AWHM = "awhm"
    SD = "sd"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def parse(cls, value: Union["Method", str]) -> "Method":
        """Accept an enum member, its label, or its name (case-insensitive)."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        if key in ("steepest_descent", "steepestdescent"):
            return cls.SD
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        choices = ", ".join(m.value for m in cls)
        raise ValueError(f"Unknown method '{value}'. Choose one of: {choices}")


class SolveStatus(Enum):
    """Terminal status of a solve."""

    GRADIENT_CONVERGED = "gradient_converged"
    MAX_ITERATIONS = "max_iterations"
    LINE_SEARCH_FAILED = "line_search_failed"
    NON_FINITE = "non_finite"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    SolveStatus.GRADIENT_CONVERGED: 0,
    SolveStatus.MAX_ITERATIONS: 2,
    SolveStatus.LINE_SEARCH_FAILED: 3,
    SolveStatus.NON_FINITE: 4,
}


@dataclass
class SolverConfig:
    """Solver configuration.

    Attributes:
        method: Coefficient rule (Method or its label).
        delta: Sufficient-decrease coefficient of the Wolfe search.
        sigma: Curvature coefficient of the Wolfe search.
        epsilon: Stop when ||g|| <= epsilon.
        max_iter: Maximum number of steps.
        hybrid: HRM/NHS/AWHM parameters.
        nu: Restart threshold.
        max_evals: Trial-step budget per line search.
        alpha_max: Upper bound on trial steps.
        descent_tol: Restart along -g unless g'd < -descent_tol ||g||^2.
        refine: Enable the secant refinement of accepted steps.
    """

    method: Method = Method.AWHM
    delta: float = 1e-4
    sigma: float = 0.9
    epsilon: float = 1e-6
    max_iter: int = 10000
    hybrid: HybridParams = field(default_factory=HybridParams)
    nu: float = 0.2
    max_evals: int = 60
    alpha_max: float = 1e6
    descent_tol: float = 1e-10
    refine: bool = True

    def __post_init__(self):
        self.method = Method.parse(self.method)
        if isinstance(self.hybrid, dict):
            self.hybrid = HybridParams(**self.hybrid)
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.nu > 0:
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.descent_tol < 0:
            raise ValueError(f"descent_tol must be nonnegative, got {self.descent_tol}")
        # WolfeParams validates delta, sigma, max_evals and alpha_max
        _ = self.ls

    @property
    def ls(self) -> WolfeParams:
        return WolfeParams(
            delta=self.delta,
            sigma=self.sigma,
            max_evals=self.max_evals,
            alpha_max=self.alpha_max,
            refine=self.refine,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["method"] = self.method.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown SolverConfig fields: {unknown}")
        return cls(**data)


@dataclass
class IterationRecord:
    """One step of the iteration, taken from x_k along d_k.

    beta is the coefficient that produced d_k: zero at k = 0 and on restarted
    records. theta/branch keep the rule's evaluation even when a restart
    discarded it.
    restarted is set when d_k = -g_k was forced by the restart test or a
    safeguard; fallback marks the safeguard cases, where the trial step is
    1 / ||g_k|| (or a shrunk step) instead of the recurrence value.
    """

    k: int
    f: float
    g_norm: float
    alpha: float
    beta: float
    theta: float
    gTd: float
    restarted: bool
    alpha_trial: float
    d_norm: float
    branch: str
    fallback: bool = False
    x: Optional[Vector] = None
    d: Optional[Vector] = None

    def to_row(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "f": self.f,
            "g_norm": self.g_norm,
            "alpha": self.alpha,
            "beta": self.beta,
            "theta": self.theta,
            "gTd": self.gTd,
            "restarted": int(self.restarted),
            "alpha_trial": self.alpha_trial,
            "d_norm": self.d_norm,
        }


@dataclass
class StepEvent:
    """Accepted step passed to solver callbacks."""

    problem: ObjectiveProblem
    record: IterationRecord
    x: Vector
    d: Vector
    f: float
    g: Vector
    search: LineSearchResult
    params: WolfeParams


@dataclass
class SolveResult:
    """Outcome of one solve."""

    status: SolveStatus
    x_final: Vector
    f_final: float
    g_norm_final: float
    iterations: int
    counters: EvalCounters
    wall_time: float
    trace: Optional[List[IterationRecord]] = None
    problem_name: str = ""
    method: str = ""
    max_g_norm: float = 0.0
    min_descent_ratio: float = float("inf")

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.GRADIENT_CONVERGED

    def __str__(self) -> str:
        mark = "CONVERGED" if self.converged else self.status.value.upper()
        return (
            f"{mark}: {self.problem_name} [{self.method}] iterations={self.iterations} "
            f"f={self.f_final:.6e} |g|={self.g_norm_final:.3e} "
            f"f_evals={self.counters.f_evals} ({self.wall_time:.3f}s)"
        )

    def to_dict(self, include_x: bool = True) -> Dict[str, Any]:
        data = {
            "problem": self.problem_name,
            "method": self.method,
            "status": self.status.value,
            "f_final": self.f_final,
            "g_norm_final": self.g_norm_final,
            "iterations": self.iterations,
            "f_evals": self.counters.f_evals,
            "g_evals": self.counters.g_evals,
            "wall_time": self.wall_time,
            "max_g_norm": self.max_g_norm,
            "min_descent_ratio": (
                self.min_descent_ratio if np.isfinite(self.min_descent_ratio) else None
            ),
        }
        if include_x:
            data["x_final"] = [float(v) for v in self.x_final]
        return data


StepCallback = Callable[[StepEvent], None]


class Solver:
    """Runs the conjugate gradient iteration on an objective.

    Solver-level failures are reported in SolveResult.status; only contract
    violations (bad dimensions) raise.

    Example:
        solver = Solver(SolverConfig(method="awhm"))
        result = solver.run(problem)
        assert result.converged
    """

    def __init__(
        self, config: Optional[SolverConfig] = None, callback: Optional[StepCallback] = None
    ):
        self.config = config or SolverConfig()
        self.callback = callback

    def run(
        self,
        problem: ObjectiveProblem,
        x_start: Optional[Vector] = None,
        trace: bool = False,
        keep_iterates: bool = False,
    ) -> SolveResult:
        """Minimize ``problem`` from ``x_start`` (problem.x0 if omitted).

        Args:
            problem: The objective.
            x_start: Start point of length n.
            trace: Record one IterationRecord per step.
            keep_iterates: Also store x_k and d_k in the records.

        Returns:
            SolveResult; trace is None unless requested.
        """
        cfg = self.config
        params = cfg.ls
        method = cfg.method.value
        counters = EvalCounters()
        records: Optional[List[IterationRecord]] = [] if trace else None
        start = time.perf_counter()

        x = np.array(problem.x0 if x_start is None else x_start, dtype=np.float64).reshape(-1)
        if x.shape[0] != problem.n:
            raise DimensionMismatch(
                f"Start point has {x.shape[0]} entries, '{problem.name}' expects {problem.n}"
            )

        def finish(status, x_final, f_final, g_norm_final, k, max_g, min_ratio) -> SolveResult:
            result = SolveResult(
                status=status,
                x_final=x_final,
                f_final=f_final,
                g_norm_final=g_norm_final,
                iterations=k,
                counters=counters,
                wall_time=time.perf_counter() - start,
                trace=records,
                problem_name=problem.name,
                method=method,
                max_g_norm=max_g,
                min_descent_ratio=min_ratio,
            )
            logger.info(
                "%s [%s]: %s after %d iterations (f_evals=%d, g_evals=%d, max |g|=%.3e)",
                problem.name,
                method,
                status.value,
                k,
                counters.f_evals,
                counters.g_evals,
                max_g,
            )
            return result

        try:
            f = evaluate(problem, x, counters)
            g = gradient(problem, x, counters)
        except NonFiniteValue:
            return finish(SolveStatus.NON_FINITE, x, float("nan"), float("nan"), 0, 0.0, np.inf)

        g_norm = float(np.linalg.norm(g))
        max_g_norm = g_norm
        min_ratio = np.inf
        if g_norm <= cfg.epsilon:
            return finish(SolveStatus.GRADIENT_CONVERGED, x, f, g_norm, 0, max_g_norm, min_ratio)

        d = -g
        lam = 1.0 / g_norm
        outcome = BetaOutcome(0.0, 0.0, BetaBranch.CLASSICAL)
        restarted = False
        fallback = False
        k = 0

        while True:
            if k >= cfg.max_iter:
                status = SolveStatus.MAX_ITERATIONS
                break

            g_sq = g_norm * g_norm
            gTd = float(np.dot(g, d))
            if not gTd < -cfg.descent_tol * g_sq:
                logger.debug("%s: k=%d lost descent (g'd=%.3e), restarting", problem.name, k, gTd)
                d, lam = -g, 1.0 / g_norm
                gTd = float(np.dot(g, d))
                restarted = fallback = True
                outcome = replace(outcome, beta=0.0)

            ls = strong_wolfe_search(problem, x, d, f, g, lam, params, counters)
            if not ls.converged:
                if ls.status is LineSearchStatus.NON_FINITE:
                    lam = lam * _NON_FINITE_SHRINK
                else:
                    d, lam = -g, 1.0 / g_norm
                    gTd = float(np.dot(g, d))
                    restarted = True
                    outcome = replace(outcome, beta=0.0)
                fallback = True
                logger.debug(
                    "%s: k=%d line search %s, retrying with trial step %.3e",
                    problem.name,
                    k,
                    ls.status.value,
                    lam,
                )
                ls = strong_wolfe_search(problem, x, d, f, g, lam, params, counters)
                if not ls.converged:
                    status = (
                        SolveStatus.NON_FINITE
                        if ls.status is LineSearchStatus.NON_FINITE
                        else SolveStatus.LINE_SEARCH_FAILED
                    )
                    break

            d_norm = float(np.linalg.norm(d))
            record = IterationRecord(
                k=k,
                f=f,
                g_norm=g_norm,
                alpha=ls.alpha,
                beta=outcome.beta,
                theta=outcome.theta,
                gTd=gTd,
                restarted=restarted,
                alpha_trial=lam,
                d_norm=d_norm,
                branch=outcome.branch.value,
                fallback=fallback,
                x=x.copy() if keep_iterates else None,
                d=d.copy() if keep_iterates else None,
            )
            if records is not None:
                records.append(record)
            min_ratio = min(min_ratio, -gTd / g_sq)
            logger.debug(
                "%s k=%d f=%.10e |g|=%.3e alpha=%.3e beta=%.3e theta=%.3f restart=%s",
                problem.name,
                k,
                f,
                g_norm,
                ls.alpha,
                outcome.beta,
                outcome.theta,
                restarted,
            )
            if self.callback is not None:
                self.callback(StepEvent(problem, record, x, d, f, g, ls, params))

            x_new, f_new, g_new = ls.x_new, ls.f_new, ls.g_new
            s = x_new - x
            g_old = g
            x, f, g = x_new, f_new, g_new
            g_norm = float(np.linalg.norm(g))
            max_g_norm = max(max_g_norm, g_norm)
            k += 1
            if g_norm <= cfg.epsilon:
                status = SolveStatus.GRADIENT_CONVERGED
                break

            outcome = compute_beta(method, BetaInputs.from_step(g, g_old, d, s), cfg.hybrid)
            if restart_check(g, g_old, cfg.nu):
                d_new = -g
                outcome = replace(outcome, beta=0.0)
                restarted = True
            else:
                d_new = direction(g, outcome.beta, d)
                restarted = False
            d_new_norm = float(np.linalg.norm(d_new))
            # a zero direction fails the descent test next step and restarts from 1 / ||g||
            lam = ls.alpha * d_norm / d_new_norm if d_new_norm > 0.0 else 1.0 / g_norm
            d = d_new
            fallback = False

        return finish(status, x, f, g_norm, k, max_g_norm, min_ratio)


def solve(
    problem: ObjectiveProblem,
    config: Optional[SolverConfig] = None,
    x_start: Optional[Vector] = None,
    callback: Optional[StepCallback] = None,
) -> SolveResult:
    """Minimize ``problem`` without recording a trace."""
    return Solver(config, callback).run(problem, x_start)


def solve_traced(
    problem: ObjectiveProblem,
    config: Optional[SolverConfig] = None,
    x_start: Optional[Vector] = None,
    keep_iterates: bool = False,
    callback: Optional[StepCallback] = None,
) -> SolveResult:
    """Minimize ``problem`` and record one IterationRecord per step."""
    return Solver(config, callback).run(problem, x_start, trace=True, keep_iterates=keep_iterates)
