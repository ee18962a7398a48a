"""Confusion matrices, per-label precision/recall/F1, and macro summaries.

Macro means are unweighted arithmetic means over the per-label values; the
spread reported next to them is the population standard deviation across
those per-label values.  A support-weighted variant is available
separately.  Zero-denominator cases (a label with no predictions, or no
true samples) define the affected metric as 0 and flag it in the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "ConfusionMatrix",
    "ClassMetrics",
    "MeanSpread",
    "MacroReport",
    "confusion",
    "per_class_metrics",
    "macro_metrics",
    "support_weighted_means",
    "accuracy",
    "weighted_binary_accuracy",
    "report_dict",
    "render_text",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    """Count grid indexed ``counts[true][predicted]`` over ``labels``."""

    labels: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        n = len(self.labels)
        if n == 0:
            raise InvalidInputError("label set is empty")
        if len(set(self.labels)) != n:
            raise InvalidInputError("labels must be unique")
        if counts.shape != (n, n):
            raise InvalidInputError(f"counts must be {n}x{n}, got {counts.shape}")
        if not np.issubdtype(counts.dtype, np.integer) or (counts < 0).any():
            raise InvalidInputError("counts must be non-negative integers")
        counts = counts.astype(np.int64, copy=True)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def total(self) -> int:
        return int(self.counts.sum())


class ClassMetrics(NamedTuple):
    label: object
    precision: float
    recall: float
    f1: float
    support: int
    undefined: frozenset


class MeanSpread(NamedTuple):
    mean: float
    spread: float


@dataclass(frozen=True)
class MacroReport:
    macro_precision: MeanSpread
    macro_recall: MeanSpread
    macro_f1: MeanSpread
    per_class: tuple[ClassMetrics, ...]


def confusion(truth: Sequence, pred: Sequence, labels: Sequence | None = None) -> ConfusionMatrix:
    """Tally (true, predicted) pairs into a confusion matrix.

    ``labels`` fixes the row/column order; when omitted it is the sorted
    union of the labels seen in either list.
    """
    if len(truth) != len(pred):
        raise InvalidInputError(f"length mismatch: {len(truth)} true vs {len(pred)} predicted")
    if not truth:
        raise InvalidInputError("cannot build a confusion matrix from zero pairs")
    if labels is None:
        labels = sorted(set(truth) | set(pred))
    labels = tuple(labels)
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(truth, pred):
        if t not in index or p not in index:
            raise InvalidInputError(f"label {t if t not in index else p!r} not in label set")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(labels=labels, counts=counts)


def _ratio(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def per_class_metrics(cm: ConfusionMatrix) -> tuple[ClassMetrics, ...]:
    """One-vs-rest precision, recall, and F1 for every label."""
    out = []
    for i, label in enumerate(cm.labels):
        tp = int(cm.counts[i, i])
        fn = int(cm.counts[i, :].sum()) - tp
        fp = int(cm.counts[:, i].sum()) - tp
        undefined = set()
        precision, p_undef = _ratio(tp, tp + fp)
        recall, r_undef = _ratio(tp, tp + fn)
        f1, f_undef = _ratio(2 * precision * recall, precision + recall)
        if p_undef:
            undefined.add("precision")
        if r_undef:
            undefined.add("recall")
        if f_undef:
            undefined.add("f1")
        out.append(
            ClassMetrics(
                label=label,
                precision=precision,
                recall=recall,
                f1=f1,
                support=tp + fn,
                undefined=frozenset(undefined),
            )
        )
    return tuple(out)


def _mean_spread(values: Sequence[float]) -> MeanSpread:
    mean = sum(values) / len(values)
    spread = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
    return MeanSpread(mean=mean, spread=spread)


def macro_metrics(cm: ConfusionMatrix) -> MacroReport:
    """Unweighted macro means with population-std spreads across labels."""
    per_class = per_class_metrics(cm)
    return MacroReport(
        macro_precision=_mean_spread([c.precision for c in per_class]),
        macro_recall=_mean_spread([c.recall for c in per_class]),
        macro_f1=_mean_spread([c.f1 for c in per_class]),
        per_class=per_class,
    )


def support_weighted_means(cm: ConfusionMatrix) -> tuple[float, float, float]:
    """Support-weighted (precision, recall, f1) means over the labels."""
    per_class = per_class_metrics(cm)
    total = cm.total
    weights = [c.support / total for c in per_class]
    return (
        sum(w * c.precision for w, c in zip(weights, per_class)),
        sum(w * c.recall for w, c in zip(weights, per_class)),
        sum(w * c.f1 for w, c in zip(weights, per_class)),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    """Fraction of samples on the diagonal."""
    total = cm.total
    if total < 1:
        raise InvalidInputError("confusion matrix is empty")
    return float(np.trace(cm.counts)) / total


def weighted_binary_accuracy(correct_a: int, total_a: int, correct_b: int, total_b: int) -> float:
    """Accuracy of a two-way split, each side weighted by its sample share.

    Algebraically identical to pooled accuracy
    ``(correct_a + correct_b) / (total_a + total_b)``.
    """
    if total_a < 1 or total_b < 1:
        raise InvalidInputError("totals must be >= 1")
    if not (0 <= correct_a <= total_a and 0 <= correct_b <= total_b):
        raise InvalidInputError("correct counts must lie in [0, total]")
    grand = total_a + total_b
    return (total_a / grand) * (correct_a / total_a) + (total_b / grand) * (correct_b / total_b)


def _label_name(label) -> str:
    code = getattr(label, "code", None)
    if code is not None:
        return f"Type {code}"
    value = getattr(label, "value", None)
    if isinstance(value, str):
        return value
    return str(label)


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def report_dict(cm: ConfusionMatrix) -> dict:
    """Full evaluation report as plain JSON-serializable data (raw ratios)."""
    report = macro_metrics(cm)
    return {
        "labels": [_label_name(label) for label in cm.labels],
        "counts": cm.counts.tolist(),
        "per_class": [
            {
                "label": _label_name(c.label),
                "precision": c.precision,
                "recall": c.recall,
                "f1": c.f1,
                "support": c.support,
                "undefined": sorted(c.undefined),
            }
            for c in report.per_class
        ],
        "macro": {
            "precision": {"mean": report.macro_precision.mean, "spread": report.macro_precision.spread},
            "recall": {"mean": report.macro_recall.mean, "spread": report.macro_recall.spread},
            "f1": {"mean": report.macro_f1.mean, "spread": report.macro_f1.spread},
        },
        "accuracy": accuracy(cm),
    }


def render_text(cm: ConfusionMatrix) -> str:
    """Aligned plain-text report; ratios shown as percentages, 2 decimals."""
    report = macro_metrics(cm)
    names = [_label_name(label) for label in cm.labels]
    width = max(12, max(len(n) for n in names) + 2)

    lines = ["confusion matrix (rows: true, columns: predicted)"]
    header = " " * width + "".join(f"{n:>{width}}" for n in names)
    lines.append(header)
    for name, row in zip(names, cm.counts):
        lines.append(f"{name:<{width}}" + "".join(f"{int(v):>{width}}" for v in row))

    lines.append("")
    lines.append(f"{'label':<{width}}{'precision':>12}{'recall':>12}{'f1':>12}{'support':>10}")
    for c in report.per_class:
        mark = " *" if c.undefined else ""
        lines.append(
            f"{_label_name(c.label):<{width}}{_pct(c.precision):>12}{_pct(c.recall):>12}"
            f"{_pct(c.f1):>12}{c.support:>10}{mark}"
        )
    if any(c.undefined for c in report.per_class):
        lines.append("  * zero-denominator metric reported as 0")

    lines.append("")
    tail_width = max(width, len("macro precision")) + 2
    for name, ms in (
        ("macro precision", report.macro_precision),
        ("macro recall", report.macro_recall),
        ("macro f1", report.macro_f1),
    ):
        lines.append(f"{name:<{tail_width}}{_pct(ms.mean)} ± {_pct(ms.spread)}")
    lines.append(f"{'accuracy':<{tail_width}}{_pct(accuracy(cm))}")
    return "\n".join(lines)
