import json
import math
import random

import numpy as np
import pytest

from disclosure_ensemble import LABELS, DataError, ParseError
from disclosure_ensemble.baseline import (
    DIM,
    LinearModel,
    SparseVector,
    TrainConfig,
    example_gradient,
    example_loss,
    feature_hash,
    featurize,
    predict_matrix,
    predict_proba,
    sigmoid,
    tokenize,
    train,
    train_all_labels,
)
from disclosure_ensemble.ensemble import format_predictions
from disclosure_ensemble.synthetic import make_corpus


@pytest.mark.parametrize(
    "text, tokens",
    [("I'm OK!", ["i", "m", "ok"]), ("", []), ("abc abc", ["abc", "abc"]), ("Tab\tNew-line\n42x", ["tab", "new", "line", "42x"])],
)
def test_tokenize(text, tokens):
    assert tokenize(text) == tokens


def test_feature_hash_is_stable():
    # first 8 bytes of blake2b-64 digest, little endian, mod 2**20
    import hashlib

    digest = hashlib.blake2b(b"hello", digest_size=8).digest()
    assert feature_hash("hello") == int.from_bytes(digest, "little") % 2**20
    assert 0 <= feature_hash("x") < DIM


def test_featurize_empty():
    assert featurize([]) == SparseVector((), ())


def test_featurize_single_token():
    v = featurize(["word"])
    assert v.indices == (feature_hash("word"),) and v.values == (1.0,)


def test_featurize_bigram_and_norm():
    v = featurize(["a", "b"])
    assert set(v.indices) == {feature_hash("a"), feature_hash("b"), feature_hash("a_b")}
    assert abs(math.fsum(x * x for x in v.values) - 1.0) < 1e-12
    assert len(featurize(["a", "b"], ngram=1)) == 2


def test_featurize_counts_repeats():
    v = featurize(["x", "x"], ngram=1)
    assert v.values == (1.0,)
    v = featurize(["x", "x", "y"], ngram=1)
    values = dict(zip(v.indices, v.values))
    assert values[feature_hash("x")] == pytest.approx(2 / math.sqrt(5))


def test_sparse_vector_invariants():
    with pytest.raises(ValueError):
        SparseVector((3, 1), (1.0, 1.0))
    with pytest.raises(ValueError):
        SparseVector((1,), (float("inf"),))


def test_sigmoid_values():
    zero = LinearModel(np.zeros(DIM), 0.0)
    assert predict_proba(zero, featurize(["a"])) == 0.5
    assert sigmoid(0.4055) == pytest.approx(0.6, abs=1e-4)
    margins = [-800, -30, -1, 0, 1, 30, 800]
    probs = [sigmoid(m) for m in margins]
    assert probs == sorted(probs)
    assert all(0.0 <= p <= 1.0 for p in probs)
    assert 0.0 < sigmoid(-30) and sigmoid(30) < 1.0


def toy_set():
    # four comments with disjoint words: linearly separable
    docs = [(["great", "day"], 1), (["love", "this"], 1), (["awful", "mess"], 0), (["hate", "rain"], 0)]
    return [(featurize(tokens), y) for tokens, y in docs]


def test_train_separable_toy():
    model = train(toy_set())
    assert [int(predict_proba(model, x) >= 0.5) for x, _ in toy_set()] == [1, 1, 0, 0]


def test_epoch_loss_non_increasing():
    model = train(toy_set(), TrainConfig(epochs=20))
    assert len(model.epoch_loss) == 20
    assert all(b <= a for a, b in zip(model.epoch_loss, model.epoch_loss[1:]))


def test_single_class_moves_bias():
    data = [(x, 1) for x, _ in toy_set()]
    model = train(data, TrainConfig(l2=1e-3))
    assert model.bias > 0
    assert all(predict_proba(model, x) > 0.5 for x, _ in data)


def test_train_empty():
    with pytest.raises(DataError):
        train([])


def test_train_config_validation():
    with pytest.raises(DataError):
        TrainConfig(learning_rate=0)
    with pytest.raises(DataError):
        TrainConfig(epochs=0)
    with pytest.raises(DataError):
        TrainConfig(l2=-1)


def test_training_is_deterministic():
    a = train(toy_set(), TrainConfig(seed=5))
    b = train(toy_set(), TrainConfig(seed=5))
    assert a.to_json() == b.to_json()
    c = train(toy_set(), TrainConfig(seed=6, epochs=1))
    assert c.to_json() != a.to_json()


def test_lazy_decay_matches_dense_sgd():
    """The scaled update equals the textbook dense update."""
    examples = toy_set()
    cfg = TrainConfig(learning_rate=0.3, epochs=3, l2=0.05, seed=2)
    model = train(examples, cfg)
    rng = random.Random(cfg.seed)
    w = np.zeros(DIM)
    b = 0.0
    order = list(range(len(examples)))
    for _ in range(cfg.epochs):
        rng.shuffle(order)
        for i in order:
            x, y = examples[i]
            z = float(np.dot(w[list(x.indices)], x.values)) + b
            r = sigmoid(z) - y
            g = cfg.l2 * w
            g[list(x.indices)] += r * np.asarray(x.values)
            w = w - cfg.learning_rate * g
            b -= cfg.learning_rate * r
    np.testing.assert_allclose(model.weights, w, rtol=1e-10, atol=1e-14)
    assert model.bias == pytest.approx(b, abs=1e-12)


def gradient_case(rng):
    tokens = [rng.choice("abcdefghij") * rng.randint(1, 3) for _ in range(rng.randint(1, 6))]
    x = featurize(tokens)
    weights = np.zeros(DIM)
    for i in x.indices:
        weights[i] = rng.uniform(-2, 2)
    # a few weights outside the example exercise the penalty term alone
    others = [rng.randrange(DIM) for _ in range(3)]
    for i in others:
        weights[i] = rng.uniform(-2, 2)
    model = LinearModel(weights, rng.uniform(-1, 1))
    return model, x, rng.randint(0, 1), rng.choice([0.0, 1e-3, 0.1]), list(x.indices) + others


def test_gradient_matches_finite_differences():
    rng = random.Random(42)
    h = 1e-5
    for _ in range(20):
        model, x, y, l2, coords = gradient_case(rng)
        grad, grad_bias = example_gradient(model, x, y, l2)
        analytic = [grad[i] for i in coords] + [grad_bias]
        numeric = []
        for i in coords:
            old = model.weights[i]
            model.weights[i] = old + h
            up = example_loss(model, x, y, l2)
            model.weights[i] = old - h
            down = example_loss(model, x, y, l2)
            model.weights[i] = old
            numeric.append((up - down) / (2 * h))
        bias = model.bias
        model.bias = bias + h
        up = example_loss(model, x, y, l2)
        model.bias = bias - h
        down = example_loss(model, x, y, l2)
        model.bias = bias
        numeric.append((up - down) / (2 * h))
        a, n = np.asarray(analytic), np.asarray(numeric)
        rel = np.linalg.norm(a - n) / max(np.linalg.norm(a) + np.linalg.norm(n), 1e-12)
        assert rel < 1e-4


def test_model_json_roundtrip():
    model = train(toy_set(), TrainConfig(seed=3))
    model.label = "support"
    back = LinearModel.from_json(model.to_json())
    assert np.array_equal(back.weights, model.weights)
    assert (back.bias, back.label, back.seed, back.ngram) == (model.bias, "support", 3, 2)


def test_model_refuses_other_hash():
    blob = json.loads(train(toy_set()).to_json())
    blob["hash"] = "murmur3"
    with pytest.raises(ParseError, match="murmur3"):
        LinearModel.from_json(json.dumps(blob))


def test_train_all_labels_and_prediction_bytes():
    records = make_corpus(40, 1)
    models = train_all_labels(records, TrainConfig(seed=4))
    assert [m.label for m in models] == list(LABELS)
    first = format_predictions(predict_matrix(models, records, "A"))
    again = format_predictions(predict_matrix(train_all_labels(records, TrainConfig(seed=4)), records, "A"))
    assert first == again
    matrix = predict_matrix(models, records, "A")
    assert all(0.0 < p < 1.0 for row in matrix.probs["A"].values() for p in row)
