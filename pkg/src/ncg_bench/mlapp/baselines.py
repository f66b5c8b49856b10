"""
First-order baselines for the tagger: Adam, SGD with momentum, RMSprop.

Each runs a fixed number of steps from W = 0 on full batches, or on seeded
minibatches when ``batch_size`` is given.
"""

import time
from abc import ABC, abstractmethod
from typing import Optional, Tuple

import numpy as np

from ncg_bench.core.objective import Vector
from ncg_bench.mlapp.dataset import TokenDataset
from ncg_bench.mlapp.model import (
    DEFAULT_L2,
    HashedFeaturizer,
    LinearTagModel,
    SoftmaxLoss,
    softmax_objective,
)


class FirstOrderUpdate(ABC):
    """Stateful update rule w <- w - lr * step(g)."""

    def __init__(self, lr: float):
        if lr < 0:
            raise ValueError(f"lr must be nonnegative, got {lr}")
        self.lr = lr
        self.t = 0

    @abstractmethod
    def direction(self, g: Vector) -> Vector:
        """Scaled step for gradient ``g``; state advances by one step."""
        pass

    def step(self, w: Vector, g: Vector) -> Vector:
        self.t += 1
        return w - self.lr * self.direction(g)


class AdamUpdate(FirstOrderUpdate):
    """Adaptive moment estimation with bias correction.

    m_t = b1 m + (1 - b1) g,  v_t = b2 v + (1 - b2) g^2,
    w <- w - lr * m_hat / (sqrt(v_hat) + eps)
    """

    def __init__(
        self, lr: float = 0.01, betas: Tuple[float, float] = (0.9, 0.999), eps: float = 1e-8
    ):
        super().__init__(lr)
        self.beta1, self.beta2 = betas
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"betas must lie in [0, 1), got {betas}")
        self.eps = eps
        self.m: Optional[np.ndarray] = None
        self.v: Optional[np.ndarray] = None

    def direction(self, g: Vector) -> Vector:
        if self.m is None:
            self.m = np.zeros_like(g)
            self.v = np.zeros_like(g)
        t = self.t
        self.m = self.beta1 * self.m + (1 - self.beta1) * g
        self.v = self.beta2 * self.v + (1 - self.beta2) * g**2
        m_hat = self.m / (1 - self.beta1**t)
        v_hat = self.v / (1 - self.beta2**t)
        return m_hat / (np.sqrt(v_hat) + self.eps)


class MomentumUpdate(FirstOrderUpdate):
    """Heavy-ball SGD: v <- mu v + g, w <- w - lr v."""

    def __init__(self, lr: float = 0.1, momentum: float = 0.9):
        super().__init__(lr)
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"momentum must lie in [0, 1), got {momentum}")
        self.momentum = momentum
        self.velocity: Optional[np.ndarray] = None

    def direction(self, g: Vector) -> Vector:
        if self.velocity is None:
            self.velocity = np.zeros_like(g)
        self.velocity = self.momentum * self.velocity + g
        return self.velocity


class RMSpropUpdate(FirstOrderUpdate):
    """Scales g by a running RMS of past gradients."""

    def __init__(self, lr: float = 0.01, alpha: float = 0.99, eps: float = 1e-8):
        super().__init__(lr)
        if not 0.0 <= alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
        self.alpha = alpha
        self.eps = eps
        self.square_avg: Optional[np.ndarray] = None

    def direction(self, g: Vector) -> Vector:
        if self.square_avg is None:
            self.square_avg = np.zeros_like(g)
        self.square_avg = self.alpha * self.square_avg + (1 - self.alpha) * g**2
        return g / (np.sqrt(self.square_avg) + self.eps)


def run_updates(
    loss: SoftmaxLoss,
    update: FirstOrderUpdate,
    steps: int,
    w0: Optional[Vector] = None,
    batch_size: Optional[int] = None,
    seed: int = 0,
) -> Vector:
    """Apply ``steps`` updates to the flattened weights.

    Minibatches are drawn without replacement from a seeded permutation that
    is refreshed every epoch.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    w = np.zeros(loss.size) if w0 is None else np.array(w0, dtype=np.float64)
    n = loss.y.shape[0]
    if batch_size is None or batch_size >= n:
        for _ in range(steps):
            w = update.step(w, loss.grad(w))
        return w
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    pos = 0
    for _ in range(steps):
        if pos + batch_size > n:
            order = rng.permutation(n)
            pos = 0
        rows = np.sort(order[pos : pos + batch_size])
        pos += batch_size
        w = update.step(w, loss.batch(rows).grad(w))
    return w


def _run_baseline(
    data: TokenDataset,
    update: FirstOrderUpdate,
    steps: int,
    l2: float,
    seed: int,
    batch_size: Optional[int],
    featurizer: Optional[HashedFeaturizer],
) -> Tuple[LinearTagModel, float]:
    featurizer = featurizer or HashedFeaturizer()
    start = time.perf_counter()
    loss = softmax_objective(data, featurizer, l2)
    w = run_updates(loss, update, steps, batch_size=batch_size, seed=seed)
    wall_time = time.perf_counter() - start
    return LinearTagModel.zeros(featurizer).with_weights(w), wall_time


def baseline_adam(
    data: TokenDataset,
    steps: int = 200,
    lr: float = 0.05,
    betas: Tuple[float, float] = (0.9, 0.999),
    l2: float = DEFAULT_L2,
    seed: int = 0,
    batch_size: Optional[int] = None,
    featurizer: Optional[HashedFeaturizer] = None,
) -> Tuple[LinearTagModel, float]:
    """Train the tagger with Adam for a fixed number of steps.

    Returns:
        (model, wall time in seconds)
    """
    return _run_baseline(data, AdamUpdate(lr, betas), steps, l2, seed, batch_size, featurizer)


def baseline_momentum(
    data: TokenDataset,
    steps: int = 200,
    lr: float = 0.05,
    momentum: float = 0.9,
    l2: float = DEFAULT_L2,
    seed: int = 0,
    batch_size: Optional[int] = None,
    featurizer: Optional[HashedFeaturizer] = None,
) -> Tuple[LinearTagModel, float]:
    update = MomentumUpdate(lr, momentum)
    return _run_baseline(data, update, steps, l2, seed, batch_size, featurizer)


def baseline_rmsprop(
    data: TokenDataset,
    steps: int = 200,
    lr: float = 0.01,
    alpha: float = 0.99,
    l2: float = DEFAULT_L2,
    seed: int = 0,
    batch_size: Optional[int] = None,
    featurizer: Optional[HashedFeaturizer] = None,
) -> Tuple[LinearTagModel, float]:
    update = RMSpropUpdate(lr, alpha)
    return _run_baseline(data, update, steps, l2, seed, batch_size, featurizer)


BASELINES = {
    "adam": baseline_adam,
    "momentum": baseline_momentum,
    "rmsprop": baseline_rmsprop,
}
