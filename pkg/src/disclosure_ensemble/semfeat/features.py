"""Per-comment semantic features: lexicon counts, polarity, sense statistics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields
from itertools import combinations

from .. import ParseError
from ..baseline import tokenize
from .lexicon import Lexicons
from .wordnet import SenseTaxonomy, path_similarity


@dataclass(frozen=True)
class FeatureVector:
    positive_words: int
    negative_words: int
    positive_polarity_confidence: float
    subjective_words: int
    sense_combination: float | None
    sense_farmost: float | None
    sense_closest: float | None


FEATURE_NAMES = tuple(f.name for f in fields(FeatureVector))


def count_lexicon(tokens, words) -> int:
    return sum(1 for t in tokens if t in words)


def polarity_confidence(tokens, lexicons: Lexicons) -> float:
    pos = count_lexicon(tokens, lexicons.positive)
    neg = count_lexicon(tokens, lexicons.negative)
    if pos + neg == 0:
        return 0.5
    return (1 + (pos - neg) / (pos + neg)) / 2


def sense_count(word: str, taxonomy: SenseTaxonomy) -> int:
    return len(taxonomy.senses(word))


def sense_combination(tokens, taxonomy: SenseTaxonomy):
    """Sum of ln(sense count) over tokens with at least one sense, else None."""
    logs = [math.log(n) for n in (sense_count(t, taxonomy) for t in tokens) if n >= 1]
    if not logs:
        return None
    return math.fsum(logs)


def sense_extremes(tokens, taxonomy: SenseTaxonomy):
    """(largest, smallest) path similarity across senses of different words.

    Repeated tokens count once; a word's senses are never paired with each
    other. Either value is None when no pair has a defined similarity.
    """
    words = sorted({t for t in tokens if taxonomy.senses(t)})
    farmost = closest = None
    for u, v in combinations(words, 2):
        for s in taxonomy.senses(u):
            for t in taxonomy.senses(v):
                sim = path_similarity(s, t, taxonomy)
                if sim is None:
                    continue
                if farmost is None or sim > farmost:
                    farmost = sim
                if closest is None or sim < closest:
                    closest = sim
    return farmost, closest


def extract_features(text: str, taxonomy: SenseTaxonomy, lexicons: Lexicons, polarity: float | None = None) -> FeatureVector:
    """All seven features for one comment.

    ``polarity`` overrides the lexicon-ratio polarity confidence when an
    external classifier's probability is available.
    """
    tokens = tokenize(text)
    farmost, closest = sense_extremes(tokens, taxonomy)
    return FeatureVector(
        positive_words=count_lexicon(tokens, lexicons.positive),
        negative_words=count_lexicon(tokens, lexicons.negative),
        positive_polarity_confidence=polarity_confidence(tokens, lexicons) if polarity is None else float(polarity),
        subjective_words=count_lexicon(tokens, lexicons.subjective),
        sense_combination=sense_combination(tokens, taxonomy),
        sense_farmost=farmost,
        sense_closest=closest,
    )


def format_features(features: dict[str, FeatureVector]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["id", *FEATURE_NAMES])
    for cid in sorted(features):
        writer.writerow([cid, *("" if v is None else repr(v) for v in astuple(features[cid]))])
    return out.getvalue()


def parse_features(data, source=None) -> dict[str, FeatureVector]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.reader(io.StringIO(data, newline=""))
    header = next(reader, None)
    if header != ["id", *FEATURE_NAMES]:
        raise ParseError(f"unexpected feature header {header}", source, 1)
    out = {}
    casts = (int, int, float, int, float, float, float)
    for row in reader:
        if not row:
            continue
        try:
            values = [None if raw == "" else cast(raw) for cast, raw in zip(casts, row[1:], strict=True)]
        except ValueError as exc:
            raise ParseError(f"bad feature value: {exc}", source, reader.line_num) from None
        out[row[0]] = FeatureVector(*values)
    return out
