"""Per-label weighted-average ensembling of two base models.

Model A takes the first weight of every pair, model B the second. Combined
probabilities are thresholded at ``tau`` with ties going to the positive class.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from . import LABELS, DataError, ParseError
from .metrics import FIELDS, compute_metrics, confusion

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class WeightPair:
    w_a: float
    w_b: float

    def __post_init__(self):
        if not (0.0 <= self.w_a <= 1.0 and 0.0 <= self.w_b <= 1.0):
            raise DataError(f"weights must lie in [0, 1]: {self}")
        if abs(self.w_a + self.w_b - 1.0) > WEIGHT_TOL:
            raise DataError(f"weights must sum to 1: {self}")

    @classmethod
    def of(cls, w_a: float) -> "WeightPair":
        return cls(w_a, 1.0 - w_a)

    def swapped(self) -> "WeightPair":
        return WeightPair(self.w_b, self.w_a)


@dataclass(frozen=True)
class EnsembleConfig:
    weights: tuple[WeightPair, ...]
    threshold: float = 0.5
    name: str = ""

    def __post_init__(self):
        if len(self.weights) != len(LABELS):
            raise DataError(f"need one weight pair per label ({len(LABELS)}), got {len(self.weights)}")
        if not 0.0 < self.threshold < 1.0:
            raise DataError(f"threshold must lie in (0, 1), got {self.threshold}")

    @classmethod
    def uniform(cls, w_a: float, threshold: float = 0.5, name: str = "") -> "EnsembleConfig":
        return cls(tuple(WeightPair.of(w_a) for _ in LABELS), threshold, name)

    @classmethod
    def from_mapping(cls, pairs: dict, threshold: float = 0.5, name: str = "") -> "EnsembleConfig":
        return cls(tuple(WeightPair(*map(float, pairs[label])) for label in LABELS), threshold, name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "threshold": self.threshold,
            "weights": {label: [p.w_a, p.w_b] for label, p in zip(LABELS, self.weights)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleConfig":
        return cls.from_mapping(data["weights"], data.get("threshold", 0.5), data.get("name", ""))


def combine(p_a: float, p_b: float, w: WeightPair) -> float:
    return w.w_a * p_a + w.w_b * p_b


def decide(p: float, threshold: float = 0.5) -> int:
    return 1 if p >= threshold else 0


# (RoBERTa-role, ALBERT-role) pairs per label for the five reported ensembles.
_PRESETS = {
    "Model 1": {
        "informational_disclosure": (0.0, 1.0),
        "emotional_disclosure": (0.0, 1.0),
        "support": (1.0, 0.0),
        "general_support": (0.0, 1.0),
        "informational_support": (1.0, 0.0),
        "emotional_support": (1.0, 0.0),
    },
    "Model 2": {label: (0.5, 0.5) for label in LABELS},
    "Model 3": {
        "informational_disclosure": (0.0, 1.0),
        "emotional_disclosure": (0.5, 0.5),
        "support": (1.0, 0.0),
        "general_support": (0.5, 0.5),
        "informational_support": (1.0, 0.0),
        "emotional_support": (0.5, 0.5),
    },
    "Model 4": {
        "informational_disclosure": (0.0, 1.0),
        "emotional_disclosure": (0.5, 0.5),
        "support": (1.0, 0.0),
        "general_support": (0.6, 0.4),
        "informational_support": (1.0, 0.0),
        "emotional_support": (0.5, 0.5),
    },
    "Model 5": {
        "informational_disclosure": (0.1, 0.9),
        "emotional_disclosure": (0.5, 0.5),
        "support": (1.0, 0.0),
        "general_support": (0.6, 0.4),
        "informational_support": (1.0, 0.0),
        "emotional_support": (0.5, 0.5),
    },
}


def preset_configs() -> dict[str, EnsembleConfig]:
    return {name: EnsembleConfig.from_mapping(pairs, name=name) for name, pairs in _PRESETS.items()}


@dataclass(frozen=True)
class PredictionMatrix:
    """Probabilities per (model, comment, label).

    ``probs[model][comment_id]`` is a tuple of six probabilities in label order.
    Every model must cover the same comment ids.
    """

    probs: dict[str, dict[str, tuple[float, ...]]]
    models: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if not self.probs:
            raise DataError("prediction matrix holds no model")
        models = tuple(self.probs)
        object.__setattr__(self, "models", models)
        coverage = None
        for model, rows in self.probs.items():
            for cid, values in rows.items():
                if len(values) != len(LABELS):
                    raise DataError(f"model {model!r}, comment {cid!r}: expected {len(LABELS)} probabilities")
                for v in values:
                    if not (0.0 <= v <= 1.0) or math.isnan(v):
                        raise DataError(f"model {model!r}, comment {cid!r}: probability {v!r} outside [0, 1]")
            ids = frozenset(rows)
            if coverage is None:
                coverage = ids
            elif ids != coverage:
                missing = sorted(coverage ^ ids)[:3]
                raise DataError(f"model {model!r} covers different comments than {models[0]!r} (e.g. {missing})")

    def ids(self) -> list[str]:
        return sorted(self.probs[self.models[0]])

    def get(self, model: str, comment_id: str) -> tuple[float, ...]:
        try:
            return self.probs[model][comment_id]
        except KeyError:
            raise DataError(f"no probabilities for model {model!r}, comment {comment_id!r}") from None

    def subset(self, ids) -> "PredictionMatrix":
        ids = list(ids)
        return PredictionMatrix({m: {i: self.get(m, i) for i in ids} for m in self.models})

    def renamed(self, mapping: dict[str, str]) -> "PredictionMatrix":
        """Select and rename models, e.g. ``{"roberta": "A", "albert": "B"}``."""
        for src in mapping:
            if src not in self.probs:
                raise DataError(f"model {src!r} not in prediction matrix (have {list(self.models)})")
        return PredictionMatrix({dst: self.probs[src] for src, dst in mapping.items()})

    def merged(self, other: "PredictionMatrix") -> "PredictionMatrix":
        probs = dict(self.probs)
        for model, rows in other.probs.items():
            if model in probs:
                raise DataError(f"model {model!r} present in both matrices")
            probs[model] = rows
        return PredictionMatrix(probs)


def parse_predictions(data, source=None) -> PredictionMatrix:
    """Read JSON Lines ``{"model": ..., "id": ..., "probs": {label: p}}``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    probs: dict[str, dict[str, tuple[float, ...]]] = {}
    for lineno, line in enumerate(data.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            model, cid, row = str(obj["model"]), str(obj["id"]), obj["probs"]
            values = tuple(float(row[label]) for label in LABELS)
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad prediction record: {exc}", source, lineno) from None
        rows = probs.setdefault(model, {})
        if cid in rows:
            raise DataError(f"{source or 'predictions'}:{lineno}: duplicate ({model!r}, {cid!r})")
        rows[cid] = values
    return PredictionMatrix(probs)


def format_predictions(matrix: PredictionMatrix) -> str:
    out = io.StringIO()
    for model in matrix.models:
        for cid in sorted(matrix.probs[model]):
            values = matrix.probs[model][cid]
            record = {"model": model, "id": cid, "probs": dict(zip(LABELS, values))}
            out.write(json.dumps(record, sort_keys=False) + "\n")
    return out.getvalue()


def ensemble_predict(matrix: PredictionMatrix, config: EnsembleConfig, models=("A", "B")) -> dict[str, tuple[int, ...]]:
    model_a, model_b = models
    for m in models:
        if m not in matrix.probs:
            raise DataError(f"model {m!r} not in prediction matrix (have {list(matrix.models)})")
    out = {}
    for cid in matrix.ids():
        pa = matrix.get(model_a, cid)
        pb = matrix.get(model_b, cid)
        out[cid] = tuple(
            decide(combine(pa[i], pb[i], config.weights[i]), config.threshold) for i in range(len(LABELS))
        )
    return out


def threshold_model(matrix: PredictionMatrix, model: str, threshold: float = 0.5) -> dict[str, tuple[int, ...]]:
    return {cid: tuple(decide(p, threshold) for p in matrix.get(model, cid)) for cid in matrix.ids()}


def format_run(predictions: dict[str, tuple[int, ...]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["id", *LABELS])
    for cid in sorted(predictions):
        writer.writerow([cid, *predictions[cid]])
    return out.getvalue()


def system_runs(matrix: PredictionMatrix, models=("A", "B"), threshold: float = 0.5) -> dict[str, dict]:
    """Runs 1-5 from the preset ensembles, runs 6-7 from each base model alone."""
    runs = {}
    for i, config in enumerate(preset_configs().values(), 1):
        runs[f"run{i}"] = ensemble_predict(matrix, EnsembleConfig(config.weights, threshold, config.name), models)
    runs["run6"] = threshold_model(matrix, models[0], threshold)
    runs["run7"] = threshold_model(matrix, models[1], threshold)
    return runs


@dataclass(frozen=True)
class GridResult:
    config: EnsembleConfig
    objective: dict[str, float]
    # label -> list of (w_a, metric dict) for every grid point, in grid order
    table: dict[str, list[tuple[float, dict[str, float]]]]


def weight_grid(step: float) -> list[float]:
    if not step > 0:
        raise DataError(f"grid step must be positive, got {step}")
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise DataError(f"grid step {step} does not divide 1 evenly")
    return [i / n for i in range(n + 1)]


def _brier(probs, gold):
    return math.fsum((p - g) ** 2 for p, g in zip(probs, gold)) / len(gold)


def grid_search(
    matrix: PredictionMatrix,
    gold: dict[str, tuple[int, ...]],
    step: float = 0.1,
    objective: str = "acc_and_f1",
    threshold: float = 0.5,
    models=("A", "B"),
) -> GridResult:
    """Choose the best weight pair for each label independently.

    Candidates are ranked by ``objective``, then F1, then the Brier score of the
    combined probabilities (lower first, rounded to 12 decimals), then the
    smaller weight on model A.
    """
    if objective not in FIELDS:
        raise DataError(f"unknown objective {objective!r}; choose from {FIELDS}")
    grid = weight_grid(step)
    ids = matrix.ids()
    missing = [cid for cid in ids if cid not in gold]
    if missing:
        raise DataError(f"missing gold labels for {len(missing)} comments, e.g. {missing[0]!r}")
    if not ids:
        raise DataError("prediction matrix is empty")
    model_a, model_b = models
    pa = [matrix.get(model_a, cid) for cid in ids]
    pb = [matrix.get(model_b, cid) for cid in ids]

    best_pairs = []
    objective_values = {}
    table = {}
    for li, label in enumerate(LABELS):
        truth = [gold[cid][li] for cid in ids]
        best_key = None
        best = None
        rows = []
        for w in grid:
            pair = WeightPair.of(w)
            combined = [combine(a[li], b[li], pair) for a, b in zip(pa, pb)]
            report = compute_metrics(confusion([decide(p, threshold) for p in combined], truth))
            rows.append((w, report.as_dict()))
            key = (-getattr(report, objective), -report.f1, round(_brier(combined, truth), 12), w)
            if best_key is None or key < best_key:
                best_key, best = key, (pair, getattr(report, objective))
        best_pairs.append(best[0])
        objective_values[label] = best[1]
        table[label] = rows
    config = EnsembleConfig(tuple(best_pairs), threshold, name="grid")
    return GridResult(config, objective_values, table)
