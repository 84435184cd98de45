"""Accuracy, positive-class precision/recall, F1 and their Acc&F1 mean."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from . import LABELS, DataError

FIELDS = ("accuracy", "precision1", "recall1", "f1", "acc_and_f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    precision1: float
    recall1: float
    f1: float
    acc_and_f1: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def confusion(pred, gold) -> ConfusionCounts:
    pred = list(pred)
    gold = list(gold)
    if len(pred) != len(gold):
        raise DataError(f"length mismatch: {len(pred)} predictions vs {len(gold)} gold labels")
    if not pred:
        raise DataError("cannot score an empty sequence")
    tp = fp = fn = tn = 0
    for p, g in zip(pred, gold):
        if p:
            if g:
                tp += 1
            else:
                fp += 1
        elif g:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def _ratio(num, den):
    return num / den if den else 0.0


def compute_metrics(counts: ConfusionCounts) -> MetricReport:
    """Score a confusion table; any ratio with a zero denominator is 0.0."""
    total = counts.total
    if total <= 0:
        raise DataError("confusion counts are empty")
    accuracy = (counts.tp + counts.tn) / total
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    return MetricReport(accuracy, precision, recall, f1, (accuracy + f1) / 2)


def score(pred, gold) -> MetricReport:
    return compute_metrics(confusion(pred, gold))


def mean_report(reports) -> MetricReport:
    """Field-wise arithmetic mean, summed in the given order."""
    reports = list(reports)
    if not reports:
        raise DataError("no reports to average")
    n = len(reports)
    return MetricReport(*(sum(getattr(r, f) for r in reports) / n for f in FIELDS))


def label_average(reports) -> MetricReport:
    reports = list(reports)
    if len(reports) != len(LABELS):
        raise DataError(f"expected {len(LABELS)} per-label reports, got {len(reports)}")
    return mean_report(reports)
