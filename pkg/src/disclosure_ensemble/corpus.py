"""Comment corpus parsing and descriptive statistics."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import LABELS, DataError, ParseError

MANDATORY = ("id", "parent_id", "author", "created_utc", "score", "text")
WEEKDAYS = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")


@dataclass(frozen=True)
class CommentRecord:
    id: str
    parent_id: str
    author: str
    created_utc: int
    score: int
    text: str
    labels: tuple[int, ...] | None = None

    def label(self, name: str) -> int:
        if self.labels is None:
            raise DataError(f"comment {self.id!r} carries no labels")
        return self.labels[LABELS.index(name)]


@dataclass(frozen=True)
class Stats:
    mean: float
    min: float
    max: float
    std: float


@dataclass(frozen=True)
class DatasetSummary:
    n_comments: int
    n_parents: int
    n_users: int
    comments_per_parent: Stats
    comments_per_user: Stats
    words_per_comment: Stats
    impact: Stats
    label_rates: dict[str, float] | None = field(default=None)


@dataclass(frozen=True)
class WeekdayTable:
    """Percent of comments with each label set to 1, per UTC weekday.

    ``rows`` maps weekday name to a label -> percent dict; weekdays without any
    comment are left out. ``overall`` is the same over the whole corpus.
    """

    rows: dict[str, dict[str, float]]
    overall: dict[str, float]


def _decode(data) -> str:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.lstrip("﻿")


def _parse_int(value: str, column: str, line: int, source) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise ParseError(f"column {column!r}: not an integer: {value!r}", source, line) from None


def parse_corpus(data, schema: dict[str, str] | None = None, source=None) -> list[CommentRecord]:
    """Parse a comma-separated corpus with a header row.

    ``schema`` maps canonical field names (``id``, ``text``, label names, ...)
    to the column names used by the file; unmapped fields use their canonical
    name. Label columns are optional but must be all present or all absent.
    """
    schema = dict(schema or {})
    reader = csv.reader(io.StringIO(_decode(data), newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing header row", source, 1) from None
    position = {name.strip(): i for i, name in enumerate(header)}

    def column(name):
        return position.get(schema.get(name, name))

    cols = {}
    for name in MANDATORY:
        idx = column(name)
        if idx is None:
            raise ParseError(f"missing mandatory column {schema.get(name, name)!r}", source, 1)
        cols[name] = idx
    label_cols = [column(name) for name in LABELS]
    present = [c is not None for c in label_cols]
    if any(present) and not all(present):
        missing = [schema.get(n, n) for n, p in zip(LABELS, present) if not p]
        raise ParseError(f"label columns must be all present or all absent; missing {missing}", source, 1)
    has_labels = all(present)

    records = []
    seen = set()
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", source, line)
        rid = row[cols["id"]]
        if not rid:
            raise DataError(f"{source or 'corpus'}:{line}: empty id")
        if rid in seen:
            raise DataError(f"{source or 'corpus'}:{line}: duplicate id {rid!r}")
        seen.add(rid)
        text = row[cols["text"]]
        if not text.strip():
            raise DataError(f"{source or 'corpus'}:{line}: empty text for id {rid!r}")
        labels = None
        if has_labels:
            labels = []
            for name, idx in zip(LABELS, label_cols):
                raw = row[idx].strip()
                if raw not in ("0", "1"):
                    raise DataError(f"{source or 'corpus'}:{line}: label {name} must be 0 or 1, got {raw!r}")
                labels.append(int(raw))
            labels = tuple(labels)
        records.append(
            CommentRecord(
                id=rid,
                parent_id=row[cols["parent_id"]],
                author=row[cols["author"]],
                created_utc=_parse_int(row[cols["created_utc"]], "created_utc", line, source),
                score=_parse_int(row[cols["score"]], "score", line, source),
                text=text,
                labels=labels,
            )
        )
    return records


def write_corpus(records, fh) -> None:
    """Write records in the canonical column layout (labels only if all have them)."""
    with_labels = bool(records) and all(r.labels is not None for r in records)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(MANDATORY) + (list(LABELS) if with_labels else []))
    for r in records:
        row = [r.id, r.parent_id, r.author, r.created_utc, r.score, r.text]
        if with_labels:
            row.extend(r.labels)
        writer.writerow(row)


def word_count(text: str) -> int:
    return len(text.split())


def describe(values) -> Stats:
    """Mean/min/max/sample std; exact summation keeps it order independent."""
    values = list(values)
    n = len(values)
    if n == 0:
        raise DataError("cannot describe an empty sample")
    mean = math.fsum(values) / n
    if n == 1:
        std = 0.0
    else:
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))
    return Stats(mean=mean, min=float(min(values)), max=float(max(values)), std=std)


def summarize(records) -> DatasetSummary:
    records = list(records)
    if not records:
        raise DataError("empty corpus")
    per_parent = Counter(r.parent_id for r in records)
    per_user = Counter(r.author for r in records)
    rates = None
    if all(r.labels is not None for r in records):
        rates = label_distribution(records)
    return DatasetSummary(
        n_comments=len(records),
        n_parents=len(per_parent),
        n_users=len(per_user),
        comments_per_parent=describe(per_parent.values()),
        comments_per_user=describe(per_user.values()),
        words_per_comment=describe(word_count(r.text) for r in records),
        impact=describe(r.score for r in records),
        label_rates=rates,
    )


def _require_labels(records):
    for r in records:
        if r.labels is None:
            raise DataError(f"comment {r.id!r} carries no labels")


def label_distribution(records) -> dict[str, float]:
    records = list(records)
    if not records:
        raise DataError("empty corpus")
    _require_labels(records)
    n = len(records)
    return {name: sum(r.labels[i] for r in records) / n for i, name in enumerate(LABELS)}


def weekday_of(created_utc: int) -> str:
    return WEEKDAYS[datetime.fromtimestamp(created_utc, tz=timezone.utc).weekday()]


def weekday_breakdown(records) -> WeekdayTable:
    records = list(records)
    if not records:
        raise DataError("empty corpus")
    _require_labels(records)
    by_day = {}
    for r in records:
        by_day.setdefault(weekday_of(r.created_utc), []).append(r)
    rows = {}
    for day in WEEKDAYS:
        if day in by_day:
            rows[day] = _percent_row(by_day[day])
    return WeekdayTable(rows=rows, overall=_percent_row(records))


def _percent_row(records):
    n = len(records)
    return {name: 100.0 * sum(r.labels[i] for r in records) / n for i, name in enumerate(LABELS)}
