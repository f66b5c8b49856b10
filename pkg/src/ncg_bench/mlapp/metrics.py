"""
Token-level precision / recall / F1 per entity class.

A token counts as a true positive for class C when the predicted tag equals
the gold tag and that tag belongs to C (B/I prefixes must match). A wrong
prediction into C is a false positive for C; a gold C token predicted
differently is a false negative for C. "O" tokens are never scored. Any
ratio with a zero denominator is 0.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from ncg_bench.mlapp.dataset import ENTITY_CLASSES, OUTSIDE, TokenDataset, tag_class
from ncg_bench.mlapp.model import LinearTagModel


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def precision_recall_f1(tp: int, fp: int, fn: int) -> Tuple[float, float, float]:
    """P = TP/(TP+FP), R = TP/(TP+FN), F1 = 2PR/(P+R)."""
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    return precision, recall, _ratio(2.0 * precision * recall, precision + recall)


@dataclass
class ClassCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return precision_recall_f1(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return precision_recall_f1(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return precision_recall_f1(self.tp, self.fp, self.fn)[2]

    def to_dict(self) -> Dict[str, float]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass
class NerMetrics:
    """Per-class counts over the four entity classes."""

    per_class: Dict[str, ClassCounts] = field(
        default_factory=lambda: {c: ClassCounts() for c in ENTITY_CLASSES}
    )

    @property
    def macro_f1(self) -> float:
        """Unweighted mean of the per-class F1 values."""
        return sum(self.per_class[c].f1 for c in ENTITY_CLASSES) / len(ENTITY_CLASSES)

    def to_dict(self, wall_time: Optional[float] = None) -> Dict[str, object]:
        data: Dict[str, object] = {c: self.per_class[c].to_dict() for c in ENTITY_CLASSES}
        data["macro_f1"] = self.macro_f1
        if wall_time is not None:
            data["wall_time_seconds"] = wall_time
        return data

    def __str__(self) -> str:
        parts = [f"{c.lower()}={self.per_class[c].f1:.3f}" for c in ENTITY_CLASSES]
        return f"macro_f1={self.macro_f1:.4f} ({', '.join(parts)})"


def metrics_from_counts(counts: Dict[str, Tuple[int, int, int]]) -> NerMetrics:
    """Build NerMetrics from {class: (tp, fp, fn)}; missing classes count zero."""
    unknown = sorted(set(counts) - set(ENTITY_CLASSES))
    if unknown:
        raise ValueError(f"Unknown entity classes: {unknown}")
    metrics = NerMetrics()
    for cls, (tp, fp, fn) in counts.items():
        metrics.per_class[cls] = ClassCounts(tp, fp, fn)
    return metrics


def score_tags(gold: Sequence[Sequence[str]], predicted: Sequence[Sequence[str]]) -> NerMetrics:
    """Token-level counts of ``predicted`` against ``gold``."""
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold sequences but {len(predicted)} predicted")
    metrics = NerMetrics()
    for gold_tags, pred_tags in zip(gold, predicted):
        if len(gold_tags) != len(pred_tags):
            raise ValueError("gold and predicted sequences differ in length")
        for g, p in zip(gold_tags, pred_tags):
            if g == p:
                if g != OUTSIDE:
                    metrics.per_class[tag_class(g)].tp += 1
                continue
            if p != OUTSIDE:
                metrics.per_class[tag_class(p)].fp += 1
            if g != OUTSIDE:
                metrics.per_class[tag_class(g)].fn += 1
    return metrics


def evaluate(model: LinearTagModel, data: TokenDataset) -> NerMetrics:
    """Score the model's predictions on every sentence of ``data``.

    Raises:
        ValueError: ``data`` is empty.
    """
    if len(data) == 0:
        raise ValueError("Cannot evaluate on an empty dataset")
    return score_tags(data.labels, model.predict(data.sentences))
