"""
Linear softmax token tagger.

Tokens are mapped to sparse binary features: hashed character 2- and
3-grams of the token and of the previous token, plus a bias column. The
training objective is the mean multinomial logistic loss plus (l2/2)||W||^2,
which is convex in W and strictly convex for l2 > 0.
"""

import hashlib
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.special import logsumexp, softmax

from ncg_bench.core.objective import DimensionMismatch, ObjectiveProblem, Vector
from ncg_bench.mlapp.dataset import TAG_INDEX, TAGS, TokenDataset

DEFAULT_BUCKETS = 2**14
DEFAULT_L2 = 1e-4
NGRAM_SIZES = (2, 3)

_SENTENCE_START = "<s>"


class HashedFeaturizer:
    """Deterministic hashed character n-gram features.

    Args:
        num_buckets: Hash buckets; the bias column is appended after them.
        seed: Salt mixed into every hash.
    """

    def __init__(self, num_buckets: int = DEFAULT_BUCKETS, seed: int = 0):
        if num_buckets < 1:
            raise ValueError(f"num_buckets must be positive, got {num_buckets}")
        self.num_buckets = num_buckets
        self.seed = seed
        self._cache = {}

    @property
    def num_features(self) -> int:
        return self.num_buckets + 1

    def _bucket(self, key: str) -> int:
        digest = hashlib.blake2b(f"{self.seed}|{key}".encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little") % self.num_buckets

    def token_buckets(self, token: str, role: str) -> List[int]:
        """Sorted distinct buckets of one token in one role ("w" or "p")."""
        key = (token, role)
        if key not in self._cache:
            padded = f"^{token}$"
            grams = {
                padded[i : i + size]
                for size in NGRAM_SIZES
                for i in range(max(len(padded) - size + 1, 0))
            }
            self._cache[key] = sorted({self._bucket(f"{role}:{g}") for g in grams})
        return self._cache[key]

    def transform(self, sentences: Sequence[Sequence[str]]) -> sparse.csr_matrix:
        """One row per token, in corpus order."""
        indptr = [0]
        indices: List[int] = []
        for tokens in sentences:
            previous = _SENTENCE_START
            for token in tokens:
                row = set(self.token_buckets(token, "w"))
                row.update(self.token_buckets(previous, "p"))
                indices.extend(sorted(row))
                indices.append(self.num_buckets)
                indptr.append(len(indices))
                previous = token
        data = np.ones(len(indices), dtype=np.float64)
        return sparse.csr_matrix(
            (data, np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
            shape=(len(indptr) - 1, self.num_features),
        )


def encode_labels(labels: Sequence[Sequence[str]]) -> np.ndarray:
    return np.array([TAG_INDEX[t] for tags in labels for t in tags], dtype=np.int64)


class SoftmaxLoss:
    """Mean multinomial logistic loss with L2 penalty over a fixed design matrix.

    Weights are handled flattened in row-major (num_classes, num_features)
    order. The last (value, gradient) pair is cached so that evaluating f and
    grad f at the same point computes the scores once.
    """

    def __init__(self, X, y: np.ndarray, num_classes: int, l2: float = DEFAULT_L2):
        if l2 < 0:
            raise ValueError(f"l2 must be nonnegative, got {l2}")
        self.X = sparse.csr_matrix(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        if self.X.shape[0] != self.y.shape[0]:
            raise DimensionMismatch(f"{self.X.shape[0]} feature rows but {self.y.shape[0]} labels")
        if self.y.size == 0:
            raise ValueError("SoftmaxLoss needs at least one sample")
        self.num_classes = num_classes
        self.l2 = float(l2)
        self._last: Optional[Tuple[np.ndarray, float, np.ndarray]] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.num_classes, self.X.shape[1])

    @property
    def size(self) -> int:
        return self.num_classes * self.X.shape[1]

    def _weights(self, w: Vector) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        if w.size != self.size:
            raise DimensionMismatch(f"Expected {self.size} weights, got {w.size}")
        return w.reshape(self.shape)

    def value_and_grad(self, w: Vector) -> Tuple[float, Vector]:
        if self._last is not None and np.array_equal(self._last[0], w):
            return self._last[1], self._last[2].copy()
        W = self._weights(w)
        n = self.y.shape[0]
        rows = np.arange(n)
        scores = np.asarray(self.X @ W.T)
        log_z = logsumexp(scores, axis=1)
        loss = float(np.mean(log_z - scores[rows, self.y])) + 0.5 * self.l2 * float(
            np.dot(W.ravel(), W.ravel())
        )
        probs = softmax(scores, axis=1)
        probs[rows, self.y] -= 1.0
        grad = np.asarray(self.X.T @ probs).T / n + self.l2 * W
        grad = grad.ravel()
        self._last = (np.array(w, dtype=np.float64, copy=True), loss, grad)
        return loss, grad.copy()

    def value(self, w: Vector) -> float:
        return self.value_and_grad(w)[0]

    def grad(self, w: Vector) -> Vector:
        return self.value_and_grad(w)[1]

    def batch(self, rows: np.ndarray) -> "SoftmaxLoss":
        """The same loss restricted to the given sample rows."""
        return SoftmaxLoss(self.X[rows], self.y[rows], self.num_classes, self.l2)

    def problem(self, name: str = "softmax", x0: Optional[Vector] = None) -> ObjectiveProblem:
        """Wrap as an ObjectiveProblem (start W = 0 unless ``x0`` is given)."""
        start = np.zeros(self.size) if x0 is None else x0
        return ObjectiveProblem(
            name=name, n=self.size, x0=start, eval_f=self.value, eval_g=self.grad
        )


@dataclass
class LinearTagModel:
    """Weights W of shape (len(TAGS), featurizer.num_features) plus the featurizer."""

    W: np.ndarray
    featurizer: HashedFeaturizer

    @classmethod
    def zeros(cls, featurizer: Optional[HashedFeaturizer] = None) -> "LinearTagModel":
        featurizer = featurizer or HashedFeaturizer()
        return cls(np.zeros((len(TAGS), featurizer.num_features)), featurizer)

    def __post_init__(self):
        expected = (len(TAGS), self.featurizer.num_features)
        if self.W.shape != expected:
            raise DimensionMismatch(f"W has shape {self.W.shape}, expected {expected}")

    def with_weights(self, w: Vector) -> "LinearTagModel":
        W = np.asarray(w, dtype=np.float64).reshape(self.W.shape)
        return LinearTagModel(W, self.featurizer)

    def predict(self, sentences: Sequence[Sequence[str]]) -> List[List[str]]:
        """Most probable tag per token."""
        if not sentences:
            return []
        best = np.argmax(np.asarray(self.featurizer.transform(sentences) @ self.W.T), axis=1)
        out, pos = [], 0
        for tokens in sentences:
            out.append([TAGS[int(i)] for i in best[pos : pos + len(tokens)]])
            pos += len(tokens)
        return out


def softmax_objective(
    data: TokenDataset, featurizer: Optional[HashedFeaturizer] = None, l2: float = DEFAULT_L2
) -> SoftmaxLoss:
    """Training loss of a tagger on all sentences of ``data``."""
    featurizer = featurizer or HashedFeaturizer()
    return SoftmaxLoss(
        featurizer.transform(data.sentences), encode_labels(data.labels), len(TAGS), l2
    )


def loss_and_grad(
    model: LinearTagModel, data: TokenDataset, l2: float = DEFAULT_L2
) -> Tuple[float, Vector]:
    """Mean logistic loss + (l2/2)||W||^2 at model.W and its flattened gradient.

    Raises:
        DimensionMismatch: W does not match the featurizer.
        ValueError: l2 < 0.
    """
    expected = (len(TAGS), model.featurizer.num_features)
    if model.W.shape != expected:
        raise DimensionMismatch(f"W has shape {model.W.shape}, expected {expected}")
    return softmax_objective(data, model.featurizer, l2).value_and_grad(model.W.ravel())
