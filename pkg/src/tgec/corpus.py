"""Corpus ingestion: normalization, tokenization, dedup, word indexing.

A corpus is an ordered list of Documents, one per input line. The word
index maps every case-folded letter-bearing token to the sorted list of
document ids it occurs in, which is what dictionary-driven extraction
joins against.
"""

from __future__ import annotations

import json
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import turkish

# Characters that terminate a sentence.
SENTENCE_TERMINATORS = ".!?…"

# Punctuation that re-attaches to the preceding token on detokenization.
ATTACH_LEFT = set(".,:;!?…%)]}")
# Punctuation that re-attaches to the following token.
ATTACH_RIGHT = set("([{")


@dataclass(frozen=True)
class Document:
    """One corpus text unit; id is its 0-based position in the corpus."""

    id: int
    text: str


def normalize(text: str) -> str:
    """Canonicalize a raw string: NFC, junk control chars dropped,
    whitespace runs collapsed to single spaces, ends stripped.

    Whitespace-class control characters (tab, CR, ...) take part in the
    collapse instead of being deleted, so "a\\tb" stays two words. NFC is
    applied last: dropping a control character can expose a combining
    mark to the preceding letter, and composing afterwards keeps the
    function idempotent.
    """
    text = "".join(
        ch for ch in text
        if ch.isspace() or not unicodedata.category(ch).startswith("C")
    )
    return unicodedata.normalize("NFC", " ".join(text.split()))


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch in turkish.APOSTROPHES


def tokenize_words(text: str) -> list[str]:
    """Split text into word tokens (maximal alnum/apostrophe runs) and
    single-character punctuation tokens. No character outside whitespace
    is dropped."""
    tokens: list[str] = []
    current: list[str] = []
    for ch in text:
        if _is_word_char(ch):
            current.append(ch)
            continue
        if current:
            tokens.append("".join(current))
            current = []
        if not ch.isspace():
            tokens.append(ch)
    if current:
        tokens.append("".join(current))
    return tokens


def detokenize(tokens: Sequence[str]) -> str:
    """Join tokens with single spaces, re-attaching punctuation
    (no space before ".,!?..." and none after "([{")."""
    pieces: list[str] = []
    for token in tokens:
        if pieces and len(token) == 1 and token in ATTACH_LEFT:
            pieces[-1] += token
        elif pieces and pieces[-1][-1] in ATTACH_RIGHT:
            pieces[-1] += token
        else:
            pieces.append(token)
    return " ".join(pieces)


def load_abbreviations(path: str | Path) -> set[str]:
    """Load a sentence-splitter stop-list, one abbreviation per line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return {line.strip() for line in lines if line.strip()}


def default_abbreviations() -> set[str]:
    from .resources import abbreviations_path

    return load_abbreviations(abbreviations_path())


def _preceding_chunk(text: str, end: int) -> str:
    """The whitespace-delimited chunk of text ending at index end (exclusive)."""
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:end]


def split_sentences(text: str, abbreviations: set[str] | None = None) -> list[str]:
    """Split normalized text at terminator+space+capital/digit boundaries.

    Periods closing a stop-list abbreviation ("Dr.") never split. Text
    with no recognizable boundary comes back as a single sentence.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    boundaries: list[int] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] not in SENTENCE_TERMINATORS:
            i += 1
            continue
        run_end = i + 1
        while run_end < n and text[run_end] in SENTENCE_TERMINATORS:
            run_end += 1
        j = run_end
        while j < n and text[j].isspace():
            j += 1
        if j == run_end or j >= n:  # no whitespace after the run, or EOF
            i = run_end
            continue
        nxt = text[j]
        if not (nxt.isupper() or nxt.isdigit()):
            i = run_end
            continue
        chunk = _preceding_chunk(text, run_end)
        if text[i:run_end] == "." and chunk in abbreviations:
            i = run_end
            continue
        boundaries.append(run_end)
        i = j
    sentences = []
    prev = 0
    for b in boundaries:
        piece = text[prev:b].strip()
        if piece:
            sentences.append(piece)
        prev = b
    tail = text[prev:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def dedup(sentences: Iterable[str]) -> list[str]:
    """Drop exact duplicates after normalization, keeping first-seen order."""
    seen: set[str] = set()
    out: list[str] = []
    for sentence in sentences:
        norm = normalize(sentence)
        if norm not in seen:
            seen.add(norm)
            out.append(norm)
    return out


def read_documents(path: str | Path, jsonl: bool = False) -> list[Document]:
    """Read a corpus file (one document per line; or JSON lines with a
    "text" field). Lines that normalize to empty are skipped; ids are
    assigned sequentially over the retained documents."""
    docs: list[Document] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if jsonl:
                line = line.strip()
                if not line:
                    continue
                text = normalize(str(json.loads(line)["text"]))
            else:
                text = normalize(line)
            if text:
                docs.append(Document(id=len(docs), text=text))
    return docs


class WordIndex:
    """Immutable map from case-folded word to sorted document id list."""

    def __init__(self, entries: dict[str, list[int]]):
        self._entries = {word: sorted(set(ids)) for word, ids in entries.items()}

    def postings(self, word: str) -> list[int]:
        return self._entries.get(word, [])

    def __contains__(self, word: str) -> bool:
        return word in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def words(self) -> list[str]:
        return sorted(self._entries)

    def items(self):
        for word in self.words():
            yield word, self._entries[word]

    def __eq__(self, other) -> bool:
        return isinstance(other, WordIndex) and self._entries == other._entries


def _index_shard(docs: Sequence[Document]) -> dict[str, set[int]]:
    shard: dict[str, set[int]] = {}
    for doc in docs:
        for token in tokenize_words(doc.text):
            if not any(ch.isalpha() for ch in token):
                continue
            shard.setdefault(turkish.fold(token), set()).add(doc.id)
    return shard


def build_word_index(corpus: Sequence[Document], workers: int = 1) -> WordIndex:
    """Index every letter-bearing token of every document. With workers > 1
    the corpus is sharded and the per-shard indexes merged; the result is
    identical to sequential construction."""
    if workers <= 1 or len(corpus) < 2 * workers:
        shards = [_index_shard(corpus)]
    else:
        chunk = (len(corpus) + workers - 1) // workers
        parts = [corpus[k:k + chunk] for k in range(0, len(corpus), chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(_index_shard, parts))
    merged: dict[str, set[int]] = {}
    for shard in shards:
        for word, ids in shard.items():
            merged.setdefault(word, set()).update(ids)
    return WordIndex({word: sorted(ids) for word, ids in merged.items()})


def save_word_index(index: WordIndex, path: str | Path) -> None:
    """Persist as sorted TSV: word<TAB>id,id,id (ids ascending)."""
    with open(path, "w", encoding="utf-8") as handle:
        for word, ids in index.items():
            handle.write(f"{word}\t{','.join(str(i) for i in ids)}\n")


def load_word_index(path: str | Path) -> WordIndex:
    entries: dict[str, list[int]] = {}
    with open(path, encoding="utf-8") as handle:
        for row, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, ids = line.split("\t")
                entries[word] = [int(i) for i in ids.split(",")]
            except ValueError as exc:
                raise ValueError(f"{path}: malformed index row {row}: {line!r}") from exc
    return WordIndex(entries)
