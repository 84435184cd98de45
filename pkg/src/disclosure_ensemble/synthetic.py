"""Seeded synthetic labelled corpora and access to the bundled resources.

The generated comments draw on the bundled lexicons and mini WordNet so every
feature is exercised, and labels depend on the words used so the baseline has
something to learn.
"""

from __future__ import annotations

import io
import random
from importlib import resources

from . import LABELS
from .corpus import CommentRecord, write_corpus

# 2020-01-06 00:00 UTC, a Monday
EPOCH = 1578268800

_OPENERS = ["i", "my", "we", "so", "honestly", "today", "yesterday", "lol"]
_EMOTION = ["feel", "sad", "lonely", "happy", "joy", "sadness", "sorrow", "angry", "love", "hate"]
_INFO = ["job", "work", "car", "dog", "cat", "school", "moved", "auto", "brother", "years"]
_SUPPORT = ["hope", "good", "glad", "great", "nice", "proud", "luck", "you"]
_ADVICE = ["try", "should", "maybe", "suggest", "automobile", "therapy"]
_COMFORT = ["sorry", "hug", "here", "care", "happiness"]
_FILLER = ["the", "a", "and", "it", "was", "is", "to", "that", "with", "about", "really", "just", "person", "chase"]


def _pick(rng, words, k):
    return [rng.choice(words) for _ in range(k)]


def make_corpus(n: int = 200, seed: int = 7) -> list[CommentRecord]:
    rng = random.Random(seed)
    n_parents = max(1, n // 3)
    n_authors = max(1, (n * 3) // 5)
    records = []
    for i in range(n):
        flags = {
            "emotional_disclosure": rng.random() < 0.3,
            "informational_disclosure": rng.random() < 0.38,
            "support": rng.random() < 0.25,
        }
        flags["general_support"] = flags["support"] and rng.random() < 0.25
        flags["informational_support"] = flags["support"] and rng.random() < 0.4
        flags["emotional_support"] = flags["support"] and rng.random() < 0.35
        words = [rng.choice(_OPENERS)]
        if flags["emotional_disclosure"]:
            words += _pick(rng, _EMOTION, rng.randint(1, 3))
        if flags["informational_disclosure"]:
            words += ["my"] + _pick(rng, _INFO, rng.randint(1, 3))
        if flags["support"]:
            words += _pick(rng, _SUPPORT, rng.randint(1, 2))
        if flags["general_support"]:
            words += ["good", "luck"]
        if flags["informational_support"]:
            words += _pick(rng, _ADVICE, rng.randint(1, 2))
        if flags["emotional_support"]:
            words += _pick(rng, _COMFORT, rng.randint(1, 2))
        words += _pick(rng, _FILLER, rng.randint(1, 8))
        body = words[:1] + rng.sample(words[1:], len(words) - 1)
        text = " ".join(body).capitalize() + rng.choice([".", "!", "?", "", " :)"])
        labels = []
        for name in LABELS:
            value = flags[name]
            # label noise
            if rng.random() < 0.05:
                value = not value
            labels.append(int(value))
        score = int(rng.expovariate(1 / 8.0)) + 3 * flags["emotional_disclosure"] - rng.randint(0, 4)
        if rng.random() < 0.03:
            score += rng.randint(100, 400)
        records.append(
            CommentRecord(
                id=f"c{i:04d}",
                parent_id=f"p{rng.randrange(n_parents):03d}",
                author=f"u{rng.randrange(n_authors):03d}",
                created_utc=EPOCH + rng.randrange(0, 28 * 86400),
                score=score,
                text=text,
                labels=tuple(labels),
            )
        )
    return records


def corpus_csv(records) -> str:
    out = io.StringIO()
    write_corpus(records, out)
    return out.getvalue()


def data_path(name: str):
    """Filesystem path of a bundled data file (``wordnet`` for the directory)."""
    return resources.files("disclosure_ensemble") / "data" / name
