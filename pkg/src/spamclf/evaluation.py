"""Confusion matrices and the full metric set used to judge the models:
accuracy / precision / recall / F1 (per class, macro, weighted), rank-based
AUC, Cohen's kappa, and Matthews correlation, plus the model-comparison
table with training times.

Spam is the positive class throughout. Zero-denominator ratios come back
as 0.0 with the metric name recorded in a `flags` tuple instead of NaN, so
comparison tables stay totally ordered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError

HAM, SPAM = "ham", "spam"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with spam as the positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise DataError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def inverted(self) -> "ConfusionMatrix":
        """The matrix produced by flipping every prediction."""
        return ConfusionMatrix(tp=self.fn, fp=self.tn, fn=self.tp, tn=self.fp)

    def swapped(self) -> "ConfusionMatrix":
        """The same predictions with the class roles exchanged (ham as
        the positive class)."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)


@dataclass(frozen=True)
class BasicMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    flags: tuple[str, ...] = ()


@dataclass
class MetricsReport:
    accuracy: float
    per_class: dict[str, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    kappa: float
    mcc: float
    support_total: int
    auc: float | None = None
    train_seconds: float = 0.0
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScoredPrediction:
    score: float
    truth: int

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise DataError(f"score must be finite, got {self.score}")
        if self.truth not in (0, 1):
            raise DataError(f"truth must be 0 or 1, got {self.truth}")


def confusion(preds: Sequence[int], truths: Sequence[int]) -> ConfusionMatrix:
    preds = np.asarray(preds)
    truths = np.asarray(truths)
    if preds.shape != truths.shape:
        raise DataError(f"predictions ({preds.shape}) and truths ({truths.shape}) differ in length")
    if preds.size == 0:
        raise DataError("cannot build a confusion matrix from zero samples")
    return ConfusionMatrix(
        tp=int(np.sum((preds == 1) & (truths == 1))),
        fp=int(np.sum((preds == 1) & (truths == 0))),
        fn=int(np.sum((preds == 0) & (truths == 1))),
        tn=int(np.sum((preds == 0) & (truths == 0))),
    )


def _ratio(num: int, den: int, name: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


def basic_metrics(cm: ConfusionMatrix) -> BasicMetrics:
    """Accuracy, and precision/recall/F1 for the positive (spam) class."""
    if cm.total == 0:
        raise DataError("empty confusion matrix")
    flags: list[str] = []
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = _ratio(cm.tp, cm.tp + cm.fp, "precision", flags)
    recall = _ratio(cm.tp, cm.tp + cm.fn, "recall", flags)
    if precision + recall == 0:
        flags.append("f1")
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return BasicMetrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1, flags=tuple(flags))


def _class_metrics(cm: ConfusionMatrix) -> ClassMetrics:
    m = basic_metrics(cm)
    return ClassMetrics(
        precision=m.precision,
        recall=m.recall,
        f1=m.f1,
        support=cm.tp + cm.fn,
        flags=m.flags,
    )


def per_class_report(preds: Sequence[int], truths: Sequence[int]) -> MetricsReport:
    """Per-class precision/recall/F1/support with macro and support-weighted
    averages, in the shape of a standard classification report.
    """
    cm = confusion(preds, truths)
    spam = _class_metrics(cm)
    ham = _class_metrics(cm.swapped())  # ham treated as positive
    total = cm.total
    weights = {HAM: ham.support / total, SPAM: spam.support / total}

    def macro(attr: str) -> float:
        return (getattr(ham, attr) + getattr(spam, attr)) / 2.0

    def weighted(attr: str) -> float:
        return weights[HAM] * getattr(ham, attr) + weights[SPAM] * getattr(spam, attr)

    return MetricsReport(
        accuracy=(cm.tp + cm.tn) / total,
        per_class={HAM: ham, SPAM: spam},
        macro_precision=macro("precision"),
        macro_recall=macro("recall"),
        macro_f1=macro("f1"),
        weighted_precision=weighted("precision"),
        weighted_recall=weighted("recall"),
        weighted_f1=weighted("f1"),
        kappa=cohen_kappa(cm),
        mcc=mcc(cm),
        support_total=total,
        flags=tuple(sorted(set(ham.flags + spam.flags))),
    )


def roc_auc(scored: Sequence[ScoredPrediction]) -> float:
    """Probability that a random positive outscores a random negative,
    counting ties as one half — computed from midranks, which equals the
    trapezoidal ROC area.
    """
    truths = np.array([s.truth for s in scored])
    scores = np.array([s.score for s in scored])
    n_pos = int(truths.sum())
    n_neg = len(truths) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs at least one positive and one negative sample")

    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum_pos = float(ranks[truths == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def cohen_kappa(cm: ConfusionMatrix) -> float:
    """Chance-corrected agreement from the confusion marginals."""
    n = cm.total
    if n == 0:
        raise DataError("empty confusion matrix")
    p_o = (cm.tp + cm.tn) / n
    actual_pos, actual_neg = cm.tp + cm.fn, cm.tn + cm.fp
    pred_pos, pred_neg = cm.tp + cm.fp, cm.tn + cm.fn
    p_e = (actual_pos * pred_pos + actual_neg * pred_neg) / (n * n)
    if p_e == 1.0:
        return 0.0
    return (p_o - p_e) / (1.0 - p_e)


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation; 0 when any marginal is empty."""
    if cm.total == 0:
        raise DataError("empty confusion matrix")
    denom_sq = (
        (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn)
    )
    if denom_sq == 0:
        return 0.0
    return (cm.tp * cm.tn - cm.fp * cm.fn) / math.sqrt(denom_sq)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    accuracy: float
    auc: float | None
    weighted_recall: float
    weighted_precision: float
    weighted_f1: float
    macro_recall: float
    macro_precision: float
    macro_f1: float
    kappa: float
    mcc: float
    train_seconds: float


def compare_models(results: Sequence[tuple[str, MetricsReport]]) -> list[ComparisonRow]:
    """Rows sorted by accuracy descending; ties fall back to name order."""
    if not results:
        raise DataError("compare_models needs at least one result")
    rows = [
        ComparisonRow(
            name=name,
            accuracy=rep.accuracy,
            auc=rep.auc,
            weighted_recall=rep.weighted_recall,
            weighted_precision=rep.weighted_precision,
            weighted_f1=rep.weighted_f1,
            macro_recall=rep.macro_recall,
            macro_precision=rep.macro_precision,
            macro_f1=rep.macro_f1,
            kappa=rep.kappa,
            mcc=rep.mcc,
            train_seconds=rep.train_seconds,
        )
        for name, rep in results
    ]
    return sorted(rows, key=lambda r: (-r.accuracy, r.name))


def roc_points(scored: Sequence[ScoredPrediction]) -> list[tuple[float, float, float]]:
    """(fpr, tpr, threshold) triples tracing the ROC step curve, one point
    per distinct score, ready for CSV emission and external plotting.
    """
    truths = np.array([s.truth for s in scored])
    scores = np.array([s.score for s in scored])
    n_pos = int(truths.sum())
    n_neg = len(truths) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs at least one positive and one negative sample")
    order = np.argsort(-scores, kind="stable")
    points = [(0.0, 0.0, math.inf)]
    tp = fp = 0
    i = 0
    while i < len(order):
        threshold = scores[order[i]]
        while i < len(order) and scores[order[i]] == threshold:
            if truths[order[i]] == 1:
                tp += 1
            else:
                fp += 1
            i += 1
        points.append((fp / n_neg, tp / n_pos, float(threshold)))
    return points


# --------------------------------------------------------------------------
# Text rendering
# --------------------------------------------------------------------------

def format_report(report: MetricsReport) -> str:
    """Classification-report style table, two decimals per cell."""
    lines = [f"{'':<14}{'precision':>10}{'recall':>10}{'f1-score':>10}{'support':>10}"]
    for label in (HAM, SPAM):
        m = report.per_class[label]
        lines.append(
            f"{label.capitalize():<14}{m.precision:>10.2f}{m.recall:>10.2f}{m.f1:>10.2f}{m.support:>10d}"
        )
    lines.append("")
    lines.append(f"{'Accuracy':<14}{'':>10}{'':>10}{report.accuracy:>10.2f}{report.support_total:>10d}")
    lines.append(
        f"{'Macro Avg':<14}{report.macro_precision:>10.2f}{report.macro_recall:>10.2f}"
        f"{report.macro_f1:>10.2f}{report.support_total:>10d}"
    )
    lines.append(
        f"{'Weighted Avg':<14}{report.weighted_precision:>10.2f}{report.weighted_recall:>10.2f}"
        f"{report.weighted_f1:>10.2f}{report.support_total:>10d}"
    )
    if report.flags:
        lines.append(f"(zero-denominator metrics reported as 0: {', '.join(report.flags)})")
    return "\n".join(lines)


def format_comparison(rows: Sequence[ComparisonRow]) -> str:
    """Model-comparison table, four decimals per metric. The first block
    uses support-weighted averages; the second repeats recall/precision/F1
    as macro averages, since both conventions are in circulation.
    """
    header = (
        f"{'Model':<10}{'Accuracy':>10}{'AUC':>10}{'Recall':>10}{'Precision':>11}"
        f"{'F1':>10}{'Kappa':>10}{'MCC':>10}{'TT (Sec)':>10}"
    )
    lines = ["Averaging: weighted", header]
    for r in rows:
        auc = f"{r.auc:>10.4f}" if r.auc is not None else f"{'n/a':>10}"
        lines.append(
            f"{r.name:<10}{r.accuracy:>10.4f}{auc}{r.weighted_recall:>10.4f}"
            f"{r.weighted_precision:>11.4f}{r.weighted_f1:>10.4f}{r.kappa:>10.4f}"
            f"{r.mcc:>10.4f}{r.train_seconds:>10.3f}"
        )
    lines.append("")
    lines.append("Averaging: macro")
    lines.append(header)
    for r in rows:
        auc = f"{r.auc:>10.4f}" if r.auc is not None else f"{'n/a':>10}"
        lines.append(
            f"{r.name:<10}{r.accuracy:>10.4f}{auc}{r.macro_recall:>10.4f}"
            f"{r.macro_precision:>11.4f}{r.macro_f1:>10.4f}{r.kappa:>10.4f}"
            f"{r.mcc:>10.4f}{r.train_seconds:>10.3f}"
        )
    return "\n".join(lines)


def report_to_dict(report: MetricsReport, cm: ConfusionMatrix | None = None) -> dict:
    """Full-precision machine-readable form of a report."""
    out = {
        "accuracy": report.accuracy,
        "per_class": {
            label: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "flags": list(m.flags),
            }
            for label, m in report.per_class.items()
        },
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f1": report.macro_f1,
        },
        "weighted": {
            "precision": report.weighted_precision,
            "recall": report.weighted_recall,
            "f1": report.weighted_f1,
        },
        "kappa": report.kappa,
        "mcc": report.mcc,
        "auc": report.auc,
        "support_total": report.support_total,
        "train_seconds": report.train_seconds,
        "flags": list(report.flags),
    }
    if cm is not None:
        out["confusion_matrix"] = {"tp": cm.tp, "fp": cm.fp, "fn": cm.fn, "tn": cm.tn}
    return out
