"""Hashed bag-of-n-grams logistic regression, one binary model per label.

Features are unigram and adjacent-bigram counts hashed into 2**20 buckets with
the first 8 bytes (little endian) of BLAKE2b over the UTF-8 feature string,
then L2-normalised. Bigrams are joined with ``_``.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import re
from dataclasses import dataclass, field

import numpy as np

from . import LABELS, DataError, ParseError
from .ensemble import PredictionMatrix

DIM = 2**20
HASH_ID = "blake2b-64le-mod2^20"
FORMAT_VERSION = 1

_SPLIT = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    return [t for t in _SPLIT.split(text.lower()) if t]


def feature_hash(feature: str) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % DIM


@dataclass(frozen=True)
class SparseVector:
    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("values must be finite")

    def __len__(self):
        return len(self.indices)


def featurize(tokens, ngram: int = 2) -> SparseVector:
    counts: dict[int, float] = {}
    features = list(tokens)
    if ngram >= 2:
        features += ["_".join(tokens[i : i + 2]) for i in range(len(tokens) - 1)]
    for feat in features:
        idx = feature_hash(feat)
        counts[idx] = counts.get(idx, 0.0) + 1.0
    if not counts:
        return SparseVector((), ())
    indices = sorted(counts)
    norm = math.sqrt(math.fsum(v * v for v in counts.values()))
    return SparseVector(tuple(indices), tuple(counts[i] / norm for i in indices))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 5
    l2: float = 1e-6
    seed: int = 0
    ngram: int = 2

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise DataError("learning_rate must be positive")
        if self.epochs < 1:
            raise DataError("epochs must be a positive integer")
        if self.l2 < 0:
            raise DataError("l2 must be non-negative")
        if self.ngram not in (1, 2):
            raise DataError("ngram must be 1 or 2")


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    label: str = ""
    seed: int = 0
    ngram: int = 2
    epoch_loss: list[float] = field(default_factory=list)

    def margin(self, x: SparseVector) -> float:
        if not len(x):
            return self.bias
        return float(np.dot(self.weights[list(x.indices)], x.values)) + self.bias

    def to_json(self) -> str:
        nz = np.flatnonzero(self.weights)
        return json.dumps(
            {
                "format": FORMAT_VERSION,
                "hash": HASH_ID,
                "dim": DIM,
                "label": self.label,
                "seed": self.seed,
                "ngram": self.ngram,
                "bias": self.bias,
                "indices": nz.tolist(),
                "weights": self.weights[nz].tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str, source=None) -> "LinearModel":
        try:
            blob = json.loads(text)
        except ValueError as exc:
            raise ParseError(f"model file is not JSON: {exc}", source) from None
        if blob.get("hash") != HASH_ID or blob.get("dim") != DIM:
            raise ParseError(
                f"model hashed with {blob.get('hash')!r}/{blob.get('dim')}, expected {HASH_ID!r}/{DIM}", source
            )
        if blob.get("format") != FORMAT_VERSION:
            raise ParseError(f"unsupported model format {blob.get('format')!r}", source)
        weights = np.zeros(DIM)
        weights[np.asarray(blob["indices"], dtype=np.int64)] = blob["weights"]
        return cls(weights, float(blob["bias"]), blob["label"], blob["seed"], blob.get("ngram", 2))


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def predict_proba(model: LinearModel, x: SparseVector) -> float:
    return sigmoid(model.margin(x))


def example_loss(model: LinearModel, x: SparseVector, y: int, l2: float) -> float:
    """Logistic loss of one example plus ``l2/2 * ||w||^2`` (bias unpenalised)."""
    z = model.margin(x)
    # log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably
    s = -z if y else z
    data = max(s, 0.0) + math.log1p(math.exp(-abs(s)))
    return data + 0.5 * l2 * float(np.dot(model.weights, model.weights))


def example_gradient(model: LinearModel, x: SparseVector, y: int, l2: float):
    """Gradient of ``example_loss``: (dense weight gradient, bias gradient)."""
    residual = predict_proba(model, x) - y
    grad = l2 * model.weights.copy()
    if len(x):
        grad[list(x.indices)] += residual * np.asarray(x.values)
    return grad, residual


def mean_loss(model: LinearModel, examples, l2: float) -> float:
    penalty = 0.5 * l2 * float(np.dot(model.weights, model.weights))
    data = []
    for x, y in examples:
        s = -model.margin(x) if y else model.margin(x)
        data.append(max(s, 0.0) + math.log1p(math.exp(-abs(s))))
    return math.fsum(data) / len(data) + penalty


def train(examples, config: TrainConfig = TrainConfig(), label: str = "") -> LinearModel:
    """Plain SGD on L2-regularised logistic loss.

    The example order is reshuffled every epoch with a ``random.Random`` seeded
    by ``config.seed``. Weight decay is applied lazily through a global scale so
    each step only touches the example's non-zero features.
    """
    examples = list(examples)
    if not examples:
        raise DataError("cannot train on an empty set")
    lr, l2 = config.learning_rate, config.l2
    decay = 1.0 - lr * l2
    if decay <= 0:
        raise DataError("learning_rate * l2 must be below 1")
    rng = random.Random(config.seed)
    v = np.zeros(DIM)
    scale = 1.0
    bias = 0.0
    order = list(range(len(examples)))
    model = LinearModel(v, bias, label, config.seed, config.ngram)
    history = []
    for _ in range(config.epochs):
        rng.shuffle(order)
        for i in order:
            x, y = examples[i]
            idx = list(x.indices)
            vals = np.asarray(x.values)
            z = scale * float(np.dot(v[idx], vals)) + bias if idx else bias
            residual = sigmoid(z) - y
            # w <- w - lr * (l2 * w + residual * x), with w = scale * v
            scale *= decay
            if idx:
                v[idx] -= (lr * residual / scale) * vals
            bias -= lr * residual
            if scale < 1e-100:
                v *= scale
                scale = 1.0
        model = LinearModel(v * scale, bias, label, config.seed, config.ngram)
        history.append(mean_loss(model, examples, l2))
    model.epoch_loss = history
    return model


def vectorize(records, ngram: int = 2) -> list[SparseVector]:
    return [featurize(tokenize(r.text), ngram) for r in records]


def train_all_labels(records, config: TrainConfig = TrainConfig()) -> list[LinearModel]:
    records = list(records)
    vectors = vectorize(records, config.ngram)
    models = []
    for li, label in enumerate(LABELS):
        if any(r.labels is None for r in records):
            raise DataError("training requires labelled records")
        models.append(train(list(zip(vectors, (r.labels[li] for r in records))), config, label))
    return models


def predict_matrix(models: list[LinearModel], records, model_id: str) -> PredictionMatrix:
    ngram = models[0].ngram if models else 2
    rows = {}
    for r, x in zip(records, vectorize(records, ngram)):
        rows[r.id] = tuple(predict_proba(m, x) for m in models)
    return PredictionMatrix({model_id: rows})


# Two base models standing in for the transformer pair: same learner, different
# seed and n-gram order.
DEFAULT_PAIR = {
    "A": TrainConfig(seed=1, ngram=2),
    "B": TrainConfig(seed=2, ngram=1),
}


def pair_configs(seed: int = 0, **overrides) -> dict[str, TrainConfig]:
    out = {}
    for model_id, cfg in DEFAULT_PAIR.items():
        params = dict(learning_rate=cfg.learning_rate, epochs=cfg.epochs, l2=cfg.l2, seed=cfg.seed + 2 * seed, ngram=cfg.ngram)
        params.update(overrides)
        out[model_id] = TrainConfig(**params)
    return out


def baseline_trainer(configs: dict[str, TrainConfig] | None = None):
    """Trainer for ``cross_validate`` fitting both baselines on each split."""
    configs = configs or pair_configs()

    def trainer(train_records, test_records):
        matrix = None
        for model_id, cfg in configs.items():
            part = predict_matrix(train_all_labels(train_records, cfg), test_records, model_id)
            matrix = part if matrix is None else matrix.merged(part)
        return matrix

    return trainer
