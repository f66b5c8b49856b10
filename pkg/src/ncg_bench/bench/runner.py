"""
Benchmark sweep runner.

Runs every (instance, method) pair of a grid, optionally in parallel, and
merges the outcomes into a RunTable ordered by (instance, solver) so the
output does not depend on scheduling. Exceptions raised by a single solve
are recorded in its cell and never abort the sweep.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

from ncg_bench.bench.suite import ProblemInstance
from ncg_bench.core import environment
from ncg_bench.core.solver import Method, SolveResult, Solver, SolverConfig
from ncg_bench.core.validators import AuditReport, StepAuditor
from ncg_bench.profiles.performance import RunCell, RunTable

logger = logging.getLogger(__name__)

# tolerance for f_final >= f_star on instances with a known minimum
F_STAR_TOL = 1e-9


@dataclass
class CellOutcome:
    """Everything one (instance, method) run produced."""

    cell: RunCell
    result: Optional[SolveResult]
    audit: AuditReport


@dataclass
class SweepResult:
    """A finished sweep: the table plus per-run details."""

    table: RunTable
    outcomes: Dict[Tuple[str, str], CellOutcome] = field(default_factory=dict)

    def audit(self, solver: str) -> AuditReport:
        report = AuditReport()
        for (_, s), outcome in sorted(self.outcomes.items()):
            if s == solver:
                report.merge(outcome.audit)
        return report

    def summary(self) -> Dict[str, object]:
        """Per-solver solved counts, audit counters and the dominance check."""
        solvers = {}
        total = len(self.table.problems)
        for s in self.table.solvers:
            solved = self.table.solved_count(s)
            audit = self.audit(s)
            solvers[s] = {
                "solved": solved,
                "total": total,
                "success_rate": solved / total if total else 0.0,
                "audit": audit.to_dict(),
                "errors": sum(
                    1 for p in self.table.problems if self.table.cell(p, s).error is not None
                ),
            }
        data: Dict[str, object] = {"problems": total, "solvers": solvers}
        if {"awhm", "hrm", "nhs"} <= set(self.table.solvers):
            awhm = solvers["awhm"]["solved"]
            floor = min(solvers["hrm"]["solved"], solvers["nhs"]["solved"])
            data["dominance"] = {
                "awhm_solved": awhm,
                "min_hrm_nhs_solved": floor,
                "holds": awhm >= floor,
            }
        return data


class BenchRunner:
    """Runs solver configurations over a grid of benchmark instances.

    Example:
        runner = BenchRunner(SolverConfig(), workers=4)
        sweep = runner.run(full_grid([2, 10]), ["awhm", "hrm", "nhs"])
        print(runner.summary_text(sweep))
    """

    def __init__(
        self,
        config: Optional[SolverConfig] = None,
        workers: Optional[int] = None,
        audit: bool = True,
        trace: bool = False,
    ):
        """Initialize the runner.

        Args:
            config: Base solver configuration; the method is replaced per column.
            workers: Parallel solves (default: NCG_BENCH_THREADS or the core count).
            audit: Attach a StepAuditor to every solve.
            trace: Keep per-iteration traces in the SolveResults.
        """
        self.config = config or SolverConfig()
        self.workers = workers if workers is not None else environment.get_thread_cap()
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        self.audit = audit
        self.trace = trace

    def run_cell(self, instance: ProblemInstance, method: Union[Method, str]) -> CellOutcome:
        """Solve one instance with one method; never raises."""
        method = Method.parse(method)
        auditor = StepAuditor() if self.audit else None
        label = method.value
        try:
            solver = Solver(replace(self.config, method=method), callback=auditor)
            result = solver.run(instance.problem, trace=self.trace)
        except Exception as exc:
            logger.warning("%s [%s] raised: %s", instance.instance_id, label, exc)
            cell = RunCell(
                problem=instance.instance_id,
                solver=label,
                solved=False,
                status="error",
                error=f"{type(exc).__name__}: {exc}",
            )
            return CellOutcome(cell, None, auditor.report if auditor else AuditReport())

        cell = RunCell(
            problem=instance.instance_id,
            solver=label,
            solved=result.converged,
            iterations=result.iterations,
            f_evals=result.counters.f_evals,
            g_evals=result.counters.g_evals,
            wall_time_ms=result.wall_time * 1000.0,
            status=result.status.value,
        )
        if (
            result.converged
            and instance.f_star is not None
            and result.f_final < instance.f_star - F_STAR_TOL
        ):
            cell.error = f"f_final {result.f_final!r} below known minimum {instance.f_star!r}"
            logger.warning("%s [%s]: %s", instance.instance_id, label, cell.error)
        logger.info(
            "%s [%s]: %s in %d iterations",
            instance.instance_id,
            label,
            cell.status,
            cell.iterations,
        )
        return CellOutcome(cell, result, auditor.report if auditor else AuditReport())

    def run(
        self, instances: Sequence[ProblemInstance], methods: Iterable[Union[Method, str]]
    ) -> SweepResult:
        """Run every (instance, method) pair.

        Returns:
            SweepResult whose table lists instances in the given order and
            solvers in the given order.
        """
        labels = []
        for m in methods:
            label = Method.parse(m).value
            if label not in labels:
                labels.append(label)
        if not labels:
            raise ValueError("At least one method is required")
        jobs = [(inst, label) for inst in instances for label in labels]

        if self.workers == 1 or len(jobs) <= 1:
            outcomes = [self.run_cell(inst, label) for inst, label in jobs]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                futures = [executor.submit(self.run_cell, inst, label) for inst, label in jobs]
                outcomes = [future.result() for future in futures]

        by_key = {(o.cell.problem, o.cell.solver): o for o in outcomes}
        problems = [inst.instance_id for inst in instances]
        cells = [by_key[(p, s)].cell for p in problems for s in labels]
        return SweepResult(RunTable(problems, labels, cells), by_key)

    def summary_text(self, sweep: SweepResult) -> str:
        """Human-readable summary of a sweep."""
        summary = sweep.summary()
        lines = [
            f"\n{'=' * 50}",
            f"Benchmark sweep: {summary['problems']} problems",
            f"{'=' * 50}",
        ]
        for label, stats in summary["solvers"].items():
            audit = stats["audit"]
            lines.append(
                f"{label:>6}: solved {stats['solved']}/{stats['total']} "
                f"({100.0 * stats['success_rate']:.1f}%), "
                f"wolfe violations {audit['wolfe_violations']}, "
                f"descent violations {audit['descent_violations']}"
            )
        failed = [
            (p, s, sweep.table.cell(p, s))
            for p in sweep.table.problems
            for s in sweep.table.solvers
            if not sweep.table.cell(p, s).solved
        ]
        if failed:
            lines.append("\nUnsolved:")
            for p, s, cell in failed:
                lines.append(f"  - {p} [{s}]: {cell.error or cell.status}")
        if "dominance" in summary:
            dom = summary["dominance"]
            verdict = "holds" if dom["holds"] else "does NOT hold"
            lines.append(
                f"\nawhm solved {dom['awhm_solved']} >= min(hrm, nhs) "
                f"{dom['min_hrm_nhs_solved']}: {verdict}"
            )
        return "\n".join(lines)


def run_sweep(
    instances: Sequence[ProblemInstance],
    methods: Iterable[Union[Method, str]],
    config: Optional[SolverConfig] = None,
    workers: Optional[int] = None,
    trace: bool = False,
) -> SweepResult:
    """Convenience wrapper around BenchRunner.run."""
    return BenchRunner(config, workers=workers, trace=trace).run(instances, methods)

