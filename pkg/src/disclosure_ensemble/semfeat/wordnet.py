"""Reader for the Princeton WordNet 3.x database files and path similarity.

Only what the semantic features need is kept: synsets, their lemmas and gloss,
hypernym edges (``@`` and ``@i``) and the lemma index.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .. import ParseError

POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
HYPERNYM_SYMBOLS = ("@", "@i")


def _norm_pos(pos: str) -> str:
    # adjective satellites live in the adjective files
    return "a" if pos == "s" else pos


def synset_id(offset: str, pos: str) -> str:
    return f"{int(offset):08d}-{_norm_pos(pos)}"


@dataclass(frozen=True)
class Synset:
    id: str
    pos: str
    lemmas: tuple[str, ...]
    gloss: str


@dataclass
class SenseTaxonomy:
    synsets: dict[str, Synset] = field(default_factory=dict)
    hypernyms: dict[str, tuple[str, ...]] = field(default_factory=dict)
    index: dict[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self._neighbours = {}
        for child, parents in self.hypernyms.items():
            for parent in parents:
                self._neighbours.setdefault(child, set()).add(parent)
                self._neighbours.setdefault(parent, set()).add(child)
        self._distance = lru_cache(maxsize=200_000)(self._shortest_path)

    def edges(self) -> set[tuple[str, str]]:
        return {(c, p) for c, ps in self.hypernyms.items() for p in ps}

    def senses(self, lemma: str) -> list[str]:
        lemma = lemma.lower()
        out = []
        for pos in POS_FILES:
            out.extend(self.index.get((lemma, pos), ()))
        return out

    def neighbours(self, sid: str):
        return self._neighbours.get(sid, ())

    def _shortest_path(self, a: str, b: str):
        if a == b:
            return 0
        # bidirectional breadth-first search on the undirected hypernym graph
        dist_a, dist_b = {a: 0}, {b: 0}
        frontier_a, frontier_b = deque([a]), deque([b])
        while frontier_a and frontier_b:
            if len(frontier_a) <= len(frontier_b):
                found = self._expand(frontier_a, dist_a, dist_b)
            else:
                found = self._expand(frontier_b, dist_b, dist_a)
            if found is not None:
                return found
        return None

    def _expand(self, frontier, dist, other):
        best = None
        for _ in range(len(frontier)):
            node = frontier.popleft()
            for nxt in self.neighbours(node):
                if nxt in other:
                    total = dist[node] + 1 + other[nxt]
                    if best is None or total < best:
                        best = total
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    frontier.append(nxt)
        return best

    def distance(self, a: str, b: str):
        if a > b:
            a, b = b, a
        return self._distance(a, b)


def _lines(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        # the license preamble lines start with two spaces
        if not line.strip() or line.startswith("  "):
            continue
        yield lineno, line


def _parse_data_line(line, lineno, source):
    gloss = ""
    if "|" in line:
        line, gloss = line.split("|", 1)
    fields = line.split()
    try:
        offset, _lexfile, ss_type, w_hex = fields[:4]
        w_cnt = int(w_hex, 16)
        pos = 4
        words = []
        for _ in range(w_cnt):
            words.append(fields[pos].lower())
            pos += 2
        p_cnt = int(fields[pos])
        pos += 1
        pointers = []
        for _ in range(p_cnt):
            symbol, target, target_pos, _st = fields[pos : pos + 4]
            if len(_st) != 4:
                raise ValueError("bad source/target field")
            pointers.append((symbol, target, target_pos))
            pos += 4
        int(offset)
    except (ValueError, IndexError):
        raise ParseError("malformed data line", source, lineno) from None
    if ss_type not in ("n", "v", "a", "s", "r"):
        raise ParseError(f"unknown synset type {ss_type!r}", source, lineno)
    return offset, ss_type, tuple(words), pointers, gloss.strip()


def _parse_index_line(line, lineno, source):
    fields = line.split()
    try:
        lemma, pos = fields[0], fields[1]
        synset_cnt = int(fields[2])
        p_cnt = int(fields[3])
        rest = fields[4 + p_cnt :]
        # sense_cnt and tagsense_cnt precede the offsets
        offsets = rest[2:]
        if len(offsets) != synset_cnt:
            raise ValueError
        for off in offsets:
            int(off)
    except (ValueError, IndexError):
        raise ParseError("malformed index line", source, lineno) from None
    return lemma.lower(), _norm_pos(pos), offsets


def parse_wordnet(index_files: dict, data_files: dict) -> SenseTaxonomy:
    """Build a taxonomy from index/data file contents keyed by part of speech.

    Keys are ``n``, ``v``, ``a``, ``r``. Values are the file contents (str or
    bytes). Raises ParseError for malformed lines, pointers or index entries
    naming a missing synset, and hypernym cycles.
    """
    synsets = {}
    raw_pointers = []
    for file_pos, text in data_files.items():
        source = f"data.{POS_FILES.get(file_pos, file_pos)}"
        for lineno, line in _lines(text):
            offset, ss_type, words, pointers, gloss = _parse_data_line(line, lineno, source)
            sid = synset_id(offset, ss_type)
            if sid in synsets:
                raise ParseError(f"duplicate synset offset {offset}", source, lineno)
            synsets[sid] = Synset(sid, _norm_pos(ss_type), words, gloss)
            raw_pointers.append((sid, pointers, source, lineno))

    loaded = {_norm_pos(p) for p in data_files}
    hypernyms = {}
    for sid, pointers, source, lineno in raw_pointers:
        for symbol, target, target_pos in pointers:
            tid = synset_id(target, target_pos)
            if tid not in synsets:
                if _norm_pos(target_pos) in loaded:
                    raise ParseError(f"pointer to unknown synset offset {target}", source, lineno)
                continue
            if symbol in HYPERNYM_SYMBOLS:
                parents = hypernyms.setdefault(sid, [])
                if tid not in parents:
                    parents.append(tid)

    index = {}
    for file_pos, text in index_files.items():
        source = f"index.{POS_FILES.get(file_pos, file_pos)}"
        for lineno, line in _lines(text):
            lemma, pos, offsets = _parse_index_line(line, lineno, source)
            ids = []
            for off in offsets:
                sid = synset_id(off, pos)
                if sid not in synsets:
                    raise ParseError(f"index entry {lemma!r} names unknown synset offset {off}", source, lineno)
                if sid not in ids:
                    ids.append(sid)
            index[(lemma, pos)] = tuple(ids)

    hypernyms = {c: tuple(ps) for c, ps in hypernyms.items()}
    _check_acyclic(hypernyms)
    return SenseTaxonomy(synsets, hypernyms, index)


def _check_acyclic(hypernyms):
    state = {}
    for start in sorted(hypernyms):
        if start in state:
            continue
        stack = [(start, iter(hypernyms.get(start, ())))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                raise ParseError(f"hypernym cycle through synset {nxt}")
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(hypernyms.get(nxt, ()))))


def load_wordnet(directory) -> SenseTaxonomy:
    """Load ``index.<pos>`` / ``data.<pos>`` files present in ``directory``."""
    directory = Path(directory)
    index_files, data_files = {}, {}
    for pos, name in POS_FILES.items():
        if (directory / f"data.{name}").exists():
            data_files[pos] = (directory / f"data.{name}").read_bytes()
        if (directory / f"index.{name}").exists():
            index_files[pos] = (directory / f"index.{name}").read_bytes()
    if not data_files and not index_files:
        raise ParseError("no WordNet index/data files found", str(directory))
    return parse_wordnet(index_files, data_files)


def path_similarity(s1: str, s2: str, taxonomy: SenseTaxonomy):
    """1 / (1 + shortest undirected hypernym path), None if undefined."""
    a = taxonomy.synsets.get(s1)
    b = taxonomy.synsets.get(s2)
    if a is None or b is None or a.pos != b.pos:
        return None
    d = taxonomy.distance(s1, s2)
    if d is None:
        return None
    return 1.0 / (1.0 + d)
