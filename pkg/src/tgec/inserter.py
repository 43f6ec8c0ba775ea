"""Clean insertions: substitute dictionary-known misspellings in organic
text to produce a parallel (source, corrected) corpus with edit spans.

One left-to-right pass per sentence: at each token position the longest
matching dictionary key is replaced and the scan jumps past it, so
inserted text is never re-scanned (no cascading substitution). Sentences
without any hit come through unchanged, which is wanted: the output is a
partially corrected corpus by design.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import turkish
from .corpus import detokenize, tokenize_words
from .gecscore import EditSpan, M2Document, classify
from .lexicon import SpellingDictionary


@dataclass(frozen=True)
class ParallelPair:
    source: str
    corrected: str
    edits: tuple[EditSpan, ...]


def clean_insert(sentence: str, dictionary: SpellingDictionary) -> ParallelPair:
    """Correct a single normalized sentence against the dictionary."""
    tokens = tokenize_words(sentence)
    out: list[str] = []
    edits: list[EditSpan] = []
    i = 0
    while i < len(tokens):
        match = dictionary.lookup_longest(tokens, i)
        if match is None:
            out.append(tokens[i])
            i += 1
            continue
        span = tokens[i:i + match.length]
        replacement = list(match.replacement_for(span))
        # Sentence-initial folded matches come out capitalized, the way
        # correction models are trained.
        if match.folded and i == 0 and replacement:
            replacement[0] = turkish.capitalize(replacement[0])
        if replacement == span:  # case fallback reproduced the source
            out.extend(span)
        else:
            edit = EditSpan(start=i, end=i + match.length, replacement=tuple(replacement))
            edits.append(EditSpan(edit.start, edit.end, edit.replacement,
                                  error_type=classify(edit, tokens)))
            out.extend(replacement)
        i += match.length
    if not edits:  # identity, preserving the original spacing verbatim
        return ParallelPair(source=sentence, corrected=sentence, edits=())
    return ParallelPair(
        source=sentence,
        corrected=detokenize(out),
        edits=tuple(edits),
    )


def build_parallel_corpus(
    sentences: Sequence[str],
    dictionary: SpellingDictionary,
    workers: int = 1,
) -> list[ParallelPair]:
    """One pair per input sentence, order preserved; zero-edit pairs kept."""
    if workers > 1 and len(sentences) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda s: clean_insert(s, dictionary), sentences))
    return [clean_insert(s, dictionary) for s in sentences]


def save_pairs(pairs: Iterable[ParallelPair], path: str | Path) -> None:
    """Parallel corpus TSV: source<TAB>corrected, one pair per line."""
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(f"{pair.source}\t{pair.corrected}\n")


def load_pairs(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for row, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: expected 2 tab-separated fields at row {row}")
            pairs.append((parts[0], parts[1]))
    return pairs


def pairs_to_m2_documents(pairs: Iterable[ParallelPair]) -> list[M2Document]:
    """Sidecar M2 view of the applied edits."""
    return [M2Document(tuple(tokenize_words(p.source)), p.edits) for p in pairs]
