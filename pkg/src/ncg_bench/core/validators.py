"""
Runtime invariant checks for solver runs.

StepAuditor is a solver callback that re-evaluates every accepted step
independently; TraceValidator checks a finished trace. Both report through
AuditReport instead of raising, so sweeps can aggregate violations.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ncg_bench.core.linesearch import satisfies_strong_wolfe
from ncg_bench.core.objective import evaluate, gradient
from ncg_bench.core.solver import IterationRecord, SolveResult, StepEvent


@dataclass
class AuditReport:
    """Violation counts gathered over one or more solves."""

    steps: int = 0
    descent_violations: int = 0
    wolfe_violations: int = 0
    monotone_violations: int = 0
    restart_violations: int = 0
    recurrence_violations: int = 0
    min_descent_ratio: float = float("inf")
    messages: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.descent_violations
            + self.wolfe_violations
            + self.monotone_violations
            + self.restart_violations
            + self.recurrence_violations
        ) == 0

    @property
    def error(self) -> Optional[str]:
        if self.passed:
            return None
        return "; ".join(self.messages[:5])

    def merge(self, other: "AuditReport") -> "AuditReport":
        self.steps += other.steps
        self.descent_violations += other.descent_violations
        self.wolfe_violations += other.wolfe_violations
        self.monotone_violations += other.monotone_violations
        self.restart_violations += other.restart_violations
        self.recurrence_violations += other.recurrence_violations
        self.min_descent_ratio = min(self.min_descent_ratio, other.min_descent_ratio)
        self.messages.extend(other.messages)
        return self

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "descent_violations": self.descent_violations,
            "wolfe_violations": self.wolfe_violations,
            "monotone_violations": self.monotone_violations,
            "restart_violations": self.restart_violations,
            "recurrence_violations": self.recurrence_violations,
            "min_descent_ratio": (
                self.min_descent_ratio if np.isfinite(self.min_descent_ratio) else None
            ),
            "passed": self.passed,
        }

    def __str__(self) -> str:
        status = "PASSED" if self.passed else "FAILED"
        msg = f"{status}: {self.steps} steps audited"
        if not self.passed:
            msg += f" - {self.error}"
        return msg


class StepAuditor:
    """Solver callback re-checking descent, strong Wolfe and monotone decrease.

    The accepted point x + alpha d is recomputed and evaluated without
    touching the solve's counters; the inequalities are tested exactly.

    Example:
        auditor = StepAuditor()
        solve(problem, config, callback=auditor)
        assert auditor.report.passed
    """

    def __init__(self):
        self.report = AuditReport()

    def __call__(self, event: StepEvent) -> None:
        report = self.report
        report.steps += 1
        name = event.problem.name
        k = event.record.k
        gTd = float(np.dot(event.g, event.d))
        g_sq = float(np.dot(event.g, event.g))

        if not gTd < 0:
            report.descent_violations += 1
            report.messages.append(f"{name} k={k}: g'd = {gTd:.3e} is not negative")
        elif g_sq > 0:
            report.min_descent_ratio = min(report.min_descent_ratio, -gTd / g_sq)

        x_new = event.x + event.search.alpha * event.d
        f_new = evaluate(event.problem, x_new)
        g_new = gradient(event.problem, x_new)
        sufficient, curvature = satisfies_strong_wolfe(
            event.f,
            gTd,
            event.search.alpha,
            f_new,
            float(np.dot(g_new, event.d)),
            event.params.delta,
            event.params.sigma,
        )
        if not (sufficient and curvature):
            report.wolfe_violations += 1
            report.messages.append(
                f"{name} k={k}: alpha={event.search.alpha:.6e} fails "
                f"{'sufficient decrease' if not sufficient else 'curvature'}"
            )
        if not f_new < event.f:
            report.monotone_violations += 1
            report.messages.append(f"{name} k={k}: f did not decrease ({event.f} -> {f_new})")


class TraceValidator:
    """Checks a finished trace against the iteration's invariants.

    Args:
        rtol: Relative tolerance for the trial-step recurrence.
    """

    def __init__(self, rtol: float = 1e-12):
        self.rtol = rtol

    def validate(self, result: SolveResult) -> AuditReport:
        """Validate ``result.trace``.

        Checks, per record: g'd < 0; f strictly decreasing between records;
        restarted records have d = -g (exactly when iterates are stored, to
        round-off from g_norm otherwise); and non-fallback records k >= 1 follow
        alpha_trial_k = alpha_{k-1} ||d_{k-1}|| / ||d_k||.
        """
        report = AuditReport()
        trace: List[IterationRecord] = result.trace or []
        name = result.problem_name
        for i, rec in enumerate(trace):
            report.steps += 1
            if not rec.gTd < 0:
                report.descent_violations += 1
                report.messages.append(f"{name} k={rec.k}: g'd = {rec.gTd:.3e}")
            elif rec.g_norm > 0:
                report.min_descent_ratio = min(report.min_descent_ratio, -rec.gTd / rec.g_norm**2)

            if rec.restarted and not self._is_steepest(rec):
                report.restart_violations += 1
                report.messages.append(f"{name} k={rec.k}: restarted but d != -g")

            if i == 0:
                continue
            prev = trace[i - 1]
            if not rec.f < prev.f:
                report.monotone_violations += 1
                report.messages.append(f"{name} k={rec.k}: f {prev.f} -> {rec.f}")
            if not rec.fallback:
                expected = prev.alpha * prev.d_norm / rec.d_norm
                if not np.isclose(rec.alpha_trial, expected, rtol=self.rtol, atol=0.0):
                    report.recurrence_violations += 1
                    report.messages.append(
                        f"{name} k={rec.k}: trial step {rec.alpha_trial:.6e}, "
                        f"recurrence gives {expected:.6e}"
                    )
        return report

    def _is_steepest(self, rec: IterationRecord) -> bool:
        if rec.d is not None:
            # d = -g exactly implies g'd = -d'd bit for bit
            return rec.gTd == -float(np.dot(rec.d, rec.d))
        return bool(np.isclose(rec.gTd, -(rec.g_norm**2), rtol=1e-12))
