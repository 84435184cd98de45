"""k-fold cross-validation and model comparison tables."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import LABELS, DataError
from .ensemble import EnsembleConfig, PredictionMatrix, ensemble_predict
from .metrics import MetricReport, label_average, mean_report, score


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    seed: int
    fold_of: dict[str, int]

    def folds(self) -> list[list[str]]:
        out = [[] for _ in range(self.k)]
        for cid, f in self.fold_of.items():
            out[f].append(cid)
        return [sorted(f) for f in out]


def kfold_split(ids, k: int, seed: int, strata: dict[str, int] | None = None) -> FoldAssignment:
    """Shuffle ids with ``seed`` and deal them round-robin into ``k`` folds.

    Ids are sorted before shuffling so the result does not depend on input
    order. With ``strata`` (id -> class) each class is shuffled separately and
    dealing continues across classes, keeping per-class counts balanced.
    """
    ids = sorted(set(ids))
    if k < 2:
        raise DataError(f"k must be at least 2, got {k}")
    if len(ids) < k:
        raise DataError(f"cannot split {len(ids)} ids into {k} folds")
    rng = random.Random(seed)
    if strata is None:
        groups = [ids]
    else:
        by_class = {}
        for cid in ids:
            by_class.setdefault(strata[cid], []).append(cid)
        groups = [by_class[c] for c in sorted(by_class)]
    fold_of = {}
    position = 0
    for group in groups:
        rng.shuffle(group)
        for cid in group:
            fold_of[cid] = position % k
            position += 1
    return FoldAssignment(k=k, seed=seed, fold_of=fold_of)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    per_label: dict[str, MetricReport]
    averaged: MetricReport


@dataclass(frozen=True)
class CVResult:
    folds: list[FoldResult]
    report: MetricReport
    per_label: dict[str, MetricReport]


def evaluate_predictions(predicted: dict[str, tuple[int, ...]], gold: dict[str, tuple[int, ...]], ids=None):
    """Per-label reports plus their label average for ``ids`` (default: all predicted)."""
    ids = sorted(predicted) if ids is None else list(ids)
    per_label = {}
    for li, label in enumerate(LABELS):
        try:
            per_label[label] = score([predicted[c][li] for c in ids], [gold[c][li] for c in ids])
        except KeyError as exc:
            raise DataError(f"missing prediction or gold label for comment {exc.args[0]!r}") from None
    return per_label, label_average(per_label.values())


def cross_validate(records, trainer, config: EnsembleConfig, folds: FoldAssignment, models=("A", "B")) -> CVResult:
    """Train on k-1 folds, score the held-out fold, average over folds.

    ``trainer(train_records, test_records)`` returns a PredictionMatrix holding
    the two base models for the test records. Fold results are aggregated in
    fold-index order.
    """
    return cross_validate_configs(records, trainer, {"config": config}, folds, models)["config"]


def cross_validate_configs(records, trainer, configs, folds: FoldAssignment, models=("A", "B")) -> dict[str, CVResult]:
    """``cross_validate`` for several configurations sharing one training per fold."""
    by_id = {r.id: r for r in records}
    for r in by_id.values():
        if r.labels is None:
            raise DataError(f"comment {r.id!r} carries no labels")
    if set(by_id) != set(folds.fold_of):
        raise DataError("fold assignment does not cover the supplied records")
    gold = {cid: r.labels for cid, r in by_id.items()}
    fold_results = {name: [] for name in configs}
    for f, test_ids in enumerate(folds.folds()):
        test_set = set(test_ids)
        train = [by_id[c] for c in sorted(by_id) if c not in test_set]
        test = [by_id[c] for c in test_ids]
        matrix = trainer(train, test).subset(test_ids)
        for name, config in configs.items():
            predicted = ensemble_predict(matrix, config, models)
            per_label, averaged = evaluate_predictions(predicted, gold, test_ids)
            fold_results[name].append(FoldResult(f, per_label, averaged))
    out = {}
    for name, results in fold_results.items():
        per_label = {label: mean_report(r.per_label[label] for r in results) for label in LABELS}
        out[name] = CVResult(results, mean_report(r.averaged for r in results), per_label)
    return out


def lookup_trainer(matrix: PredictionMatrix):
    """Trainer that ignores training data and returns stored probabilities."""

    def trainer(train, test):
        return matrix.subset(r.id for r in test)

    return trainer


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    report: MetricReport
    per_label: dict[str, MetricReport]
    config: EnsembleConfig | None = None


def compare_models(matrix: PredictionMatrix, gold, configs, models=("A", "B"), sort: bool = False) -> list[ComparisonRow]:
    """One label-averaged row (plus per-label breakdown) per configuration.

    ``configs`` maps row names to EnsembleConfig. With ``sort`` rows are ordered
    by Acc&F1, best first; ties keep input order.
    """
    for m in models:
        if m not in matrix.probs:
            raise DataError(f"configs reference model {m!r}, not present in predictions ({list(matrix.models)})")
    rows = []
    for name, config in configs.items():
        predicted = ensemble_predict(matrix, config, models)
        per_label, averaged = evaluate_predictions(predicted, gold)
        rows.append(ComparisonRow(name, averaged, per_label, config))
    if sort:
        rows.sort(key=lambda r: -r.report.acc_and_f1)
    return rows
