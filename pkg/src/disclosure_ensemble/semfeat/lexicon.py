"""Opinion-lexicon word lists and subjectivity-clue files."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

from .. import ParseError

SUBJECTIVE_TYPES = ("weaksubj", "strongsubj")


def _text(data) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError:
            # the published opinion lexicon ships as latin-1
            return data.decode("latin-1")
    return data


def parse_opinion_lexicon(data, source=None) -> frozenset[str]:
    """One word per line; lines starting with ';' are comments."""
    words = set()
    for line in _text(data).splitlines():
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        words.add(line.lower())
    if not words:
        warnings.warn(f"empty opinion lexicon: {source or '<bytes>'}", stacklevel=2)
    return frozenset(words)


def parse_clue(line: str, lineno=None, source=None) -> dict[str, str]:
    record = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise ParseError(f"malformed clue field {token!r}", source, lineno)
        record[key] = value
    if "word1" not in record or "type" not in record:
        raise ParseError("clue record lacks word1= or type=", source, lineno)
    return record


def parse_subjectivity_clues(data, source=None) -> frozenset[str]:
    """Words of every weaksubj/strongsubj record in a ``key=value`` clue file."""
    words = set()
    for lineno, line in enumerate(_text(data).splitlines(), 1):
        if not line.strip():
            continue
        record = parse_clue(line, lineno, source)
        if record["type"] in SUBJECTIVE_TYPES:
            words.add(record["word1"].lower())
    if not words:
        warnings.warn(f"empty subjectivity clue file: {source or '<bytes>'}", stacklevel=2)
    return frozenset(words)


@dataclass(frozen=True)
class Lexicons:
    positive: frozenset[str]
    negative: frozenset[str]
    subjective: frozenset[str]

    @classmethod
    def load(cls, positive, negative, subjective) -> "Lexicons":
        positive, negative, subjective = map(Path, (positive, negative, subjective))
        return cls(
            parse_opinion_lexicon(positive.read_bytes(), str(positive)),
            parse_opinion_lexicon(negative.read_bytes(), str(negative)),
            parse_subjectivity_clues(subjective.read_bytes(), str(subjective)),
        )
