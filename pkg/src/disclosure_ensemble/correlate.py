"""Pearson correlation of comment score (Impact) with labels and features."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import LABELS, DataError
from .semfeat.features import FEATURE_NAMES


class UndefinedCorrelation(DataError):
    """One of the inputs has zero variance."""


@dataclass(frozen=True)
class CorrelationResult:
    variable: str
    rho: float | None
    n: int
    n_dropped: int = 0


def pearson(x, y) -> float:
    """Product-moment correlation with exactly rounded two-pass sums.

    Symmetric in its arguments bit for bit and clamped to [-1, 1].
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x)
    if n != len(y):
        raise DataError(f"length mismatch: {n} vs {len(y)}")
    if n < 2:
        raise DataError("need at least two observations")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [v - mx for v in x]
    dy = [v - my for v in y]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("correlation undefined: zero variance")
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _correlate(name, scores, values):
    pairs = [(s, v) for s, v in zip(scores, values) if v is not None]
    dropped = len(scores) - len(pairs)
    if len(pairs) < 2:
        return CorrelationResult(name, None, len(pairs), dropped)
    try:
        rho = pearson([p[0] for p in pairs], [p[1] for p in pairs])
    except UndefinedCorrelation:
        rho = None
    return CorrelationResult(name, rho, len(pairs), dropped)


def correlate_labels(records) -> list[CorrelationResult]:
    """Score vs each 0/1 label; constant columns give ``rho=None``."""
    records = list(records)
    for r in records:
        if r.labels is None:
            raise DataError(f"comment {r.id!r} carries no labels")
    scores = [r.score for r in records]
    return [_correlate(label, scores, [r.labels[i] for r in records]) for i, label in enumerate(LABELS)]


def correlate_features(records, features) -> list[CorrelationResult]:
    """Score vs each semantic feature, dropping comments where it is absent.

    ``features`` maps comment id to FeatureVector.
    """
    records = list(records)
    missing = [r.id for r in records if r.id not in features]
    if missing:
        raise DataError(f"no features for {len(missing)} comments, e.g. {missing[0]!r}")
    scores = [r.score for r in records]
    return [
        _correlate(name, scores, [getattr(features[r.id], name) for r in records]) for name in FEATURE_NAMES
    ]
