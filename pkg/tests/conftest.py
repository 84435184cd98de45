import pytest

from disclosure_ensemble import LABELS
from disclosure_ensemble.corpus import CommentRecord
from disclosure_ensemble.semfeat import Lexicons, load_wordnet
from disclosure_ensemble.synthetic import data_path

# Monday 2020-01-06 00:00 UTC
MONDAY = 1578268800
DAY = 86400


def record(i, labels=(0,) * 6, score=0, text="some text", parent="p", author="u", ts=MONDAY):
    return CommentRecord(f"c{i}", parent, author, ts, score, text, tuple(labels))


@pytest.fixture(scope="session")
def taxonomy():
    return load_wordnet(data_path("wordnet"))


@pytest.fixture(scope="session")
def lexicons():
    return Lexicons.load(
        data_path("positive-words.txt"), data_path("negative-words.txt"), data_path("subjclues.tff")
    )


@pytest.fixture
def label_names():
    return LABELS
