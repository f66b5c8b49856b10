"""Entity tagging demo: synthetic data, a softmax tagger, metrics and baselines."""

from ncg_bench.mlapp.baselines import baseline_adam
from ncg_bench.mlapp.dataset import TAGS, TokenDataset, generate_synthetic, validate_bio
from ncg_bench.mlapp.metrics import NerMetrics, evaluate, precision_recall_f1
from ncg_bench.mlapp.model import HashedFeaturizer, LinearTagModel, loss_and_grad
from ncg_bench.mlapp.trainer import TrainingRun, train

__all__ = [
    "baseline_adam",
    "TAGS",
    "TokenDataset",
    "generate_synthetic",
    "validate_bio",
    "NerMetrics",
    "evaluate",
    "precision_recall_f1",
    "HashedFeaturizer",
    "LinearTagModel",
    "loss_and_grad",
    "TrainingRun",
    "train",
]
