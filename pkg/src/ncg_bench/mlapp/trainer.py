"""
Tagger training with the conjugate gradient solver.
"""

import logging
import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ncg_bench.core.objective import ObjectiveProblem
from ncg_bench.core.solver import (
    IterationRecord,
    SolveResult,
    SolverConfig,
    StepCallback,
    solve,
    solve_traced,
)
from ncg_bench.mlapp.dataset import TokenDataset
from ncg_bench.mlapp.model import (
    DEFAULT_L2,
    HashedFeaturizer,
    LinearTagModel,
    SoftmaxLoss,
    softmax_objective,
)

logger = logging.getLogger(__name__)


def default_training_config(method: str = "awhm") -> SolverConfig:
    """Solver settings used for the tagger unless a config is given."""
    return SolverConfig(method=method, epsilon=1e-5, max_iter=500)


@dataclass
class TrainingRun:
    """A trained tagger plus the solve that produced it."""

    model: LinearTagModel
    result: SolveResult
    wall_time: float

    @property
    def trace(self) -> List[IterationRecord]:
        return self.result.trace or []

    @property
    def losses(self) -> List[float]:
        """Loss at the start of every accepted step, then the final loss."""
        return [r.f for r in self.trace] + [self.result.f_final]


def train(
    data: TokenDataset,
    solver_config: Optional[SolverConfig] = None,
    l2: float = DEFAULT_L2,
    featurizer: Optional[HashedFeaturizer] = None,
    callback: Optional[StepCallback] = None,
) -> TrainingRun:
    """Minimize the tagger loss on every sentence of ``data`` from W = 0.

    Args:
        data: Training sentences.
        solver_config: Solver settings (default_training_config() if omitted).
        l2: L2 penalty.
        featurizer: Feature map (2**14 buckets if omitted).
        callback: Forwarded to the solver.

    Returns:
        TrainingRun with the trained model and the solver trace.
    """
    featurizer = featurizer or HashedFeaturizer()
    config = solver_config or default_training_config()
    start = time.perf_counter()
    loss = softmax_objective(data, featurizer, l2)
    result = solve_traced(loss.problem("tagger"), config, callback=callback)
    wall_time = time.perf_counter() - start
    logger.info("trained tagger with %s: %s", config.method.value, result)
    model = LinearTagModel.zeros(featurizer).with_weights(result.x_final)
    return TrainingRun(model, result, wall_time)


def evals_to_threshold(
    loss: SoftmaxLoss, config: SolverConfig, threshold: float
) -> Optional[int]:
    """Objective evaluations a solve from W = 0 spends before f <= threshold.

    Returns:
        The evaluation count at the first accepted iterate at or below the
        threshold, or None if the solve stops before reaching it.
    """
    calls = [0]

    def counted(w):
        calls[0] += 1
        return loss.value(w)

    start = np.zeros(loss.size)
    if loss.value(start) <= threshold:
        return 1
    problem = ObjectiveProblem("tagger", loss.size, start, counted, loss.grad)
    reached: List[int] = []

    def record(event):
        if not reached and event.search.f_new <= threshold:
            reached.append(calls[0])

    solve(problem, config, callback=record)
    return reached[0] if reached else None
