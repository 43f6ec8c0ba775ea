"""Fixpoint expansion of the spelling dictionary over an indexed corpus.

Each iteration: pull the documents whose words hit a dictionary key,
harvest their distinct non-analyzable words, resolve each to a unique
correction, and merge the new pairs in. Repeats until an iteration adds
nothing. Documents are extracted at most once across a run, so the
per-iteration extraction counts shrink the way the growth report shows.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import turkish
from .candidates import DEFAULT_COMBINATION_CAP, resolve_unique
from .corpus import Document, WordIndex, tokenize_words
from .lexicon import SpellingDictionary
from .morphology import AnalyzabilityOracle

DEFAULT_MAX_ITERATIONS = 50

REPORT_COLUMNS = ("iteration", "dict_size", "extracted_texts", "distinct_words", "dict_delta")


class ExpansionError(Exception):
    pass


@dataclass(frozen=True)
class IterationReport:
    iteration: int        # 1-based
    dict_size: int        # entries at iteration start
    extracted_texts: int  # novel documents containing >= 1 dictionary key
    distinct_words: int   # unique non-analyzable, non-key words harvested
    dict_delta: int       # entries added this iteration


@dataclass(frozen=True)
class ExpansionStep:
    dictionary: SpellingDictionary
    report: IterationReport
    extracted_ids: frozenset[int]


@dataclass(frozen=True)
class ExpansionRun:
    reports: tuple[IterationReport, ...]
    final_dictionary: SpellingDictionary
    extracted_ids: frozenset[int]
    converged: bool


def _folded_tokens(doc: Document) -> list[str]:
    return [turkish.fold(t) for t in tokenize_words(doc.text)
            if any(ch.isalpha() for ch in t)]


def _contains_phrase(tokens: Sequence[str], phrase: Sequence[str]) -> bool:
    n, m = len(tokens), len(phrase)
    first = phrase[0]
    for i in range(n - m + 1):
        if tokens[i] == first and list(tokens[i:i + m]) == list(phrase):
            return True
    return False


def _matching_documents(
    dictionary: SpellingDictionary,
    index: WordIndex,
    corpus: Sequence[Document],
    token_cache: dict[int, list[str]],
) -> set[int]:
    """Ids of documents containing any dictionary key. Multi-token keys
    join through their first token's postings and a containment scan."""
    matched: set[int] = set()
    for key in dictionary.keys():
        folded_key = [turkish.fold(tok) for tok in key]
        postings = index.postings(folded_key[0])
        if not postings:
            continue
        if len(folded_key) == 1:
            matched.update(postings)
            continue
        for doc_id in postings:
            if doc_id in matched:
                continue
            tokens = token_cache.get(doc_id)
            if tokens is None:
                tokens = _folded_tokens(corpus[doc_id])
                token_cache[doc_id] = tokens
            if _contains_phrase(tokens, folded_key):
                matched.add(doc_id)
    return matched


def expand_once(
    dictionary: SpellingDictionary,
    index: WordIndex,
    corpus: Sequence[Document],
    oracle: AnalyzabilityOracle,
    iteration: int = 1,
    exclude_ids: frozenset[int] = frozenset(),
    deasciify_cap: int = DEFAULT_COMBINATION_CAP,
) -> ExpansionStep:
    """One pass of the five-step loop: extract, harvest, resolve, merge.

    exclude_ids carries the documents already extracted by earlier
    iterations of a run; they are not re-extracted.
    """
    if len(dictionary) == 0:
        raise ExpansionError("nothing to expand: the spelling dictionary is empty")
    token_cache: dict[int, list[str]] = {}
    matched = _matching_documents(dictionary, index, corpus, token_cache)
    novel = sorted(matched - exclude_ids)

    existing_keys = {turkish.fold(key[0]) for key in dictionary.keys() if len(key) == 1}
    words: set[str] = set()
    for doc_id in novel:
        tokens = token_cache.get(doc_id)
        if tokens is None:
            tokens = _folded_tokens(corpus[doc_id])
        words.update(tokens)
    words -= existing_keys
    words = {w for w in words if not oracle.is_analyzable(w)}

    resolved = []
    for word in sorted(words):
        entry = resolve_unique(word, oracle, iteration=iteration, cap=deasciify_cap)
        if entry is not None:
            resolved.append(entry)
    merge = dictionary.merge(resolved)

    report = IterationReport(
        iteration=iteration,
        dict_size=len(dictionary),
        extracted_texts=len(novel),
        distinct_words=len(words),
        dict_delta=merge.added,
    )
    return ExpansionStep(merge.dictionary, report, frozenset(novel))


def expand_to_fixpoint(
    dictionary: SpellingDictionary,
    index: WordIndex,
    corpus: Sequence[Document],
    oracle: AnalyzabilityOracle,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    deasciify_cap: int = DEFAULT_COMBINATION_CAP,
) -> ExpansionRun:
    """Iterate expand_once until an iteration adds zero entries, or until
    max_iterations (run flagged non-converged, not fatal)."""
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    reports: list[IterationReport] = []
    extracted: set[int] = set()
    converged = False
    for iteration in range(1, max_iterations + 1):
        step = expand_once(
            dictionary, index, corpus, oracle,
            iteration=iteration, exclude_ids=frozenset(extracted),
            deasciify_cap=deasciify_cap,
        )
        reports.append(step.report)
        extracted.update(step.extracted_ids)
        dictionary = step.dictionary
        if step.report.dict_delta == 0:
            converged = True
            break
    return ExpansionRun(tuple(reports), dictionary, frozenset(extracted), converged)


def save_report(reports: Sequence[IterationReport], path: str | Path) -> None:
    """Persist the per-iteration growth report as TSV."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\t".join(REPORT_COLUMNS) + "\n")
        for r in reports:
            handle.write(f"{r.iteration}\t{r.dict_size}\t{r.extracted_texts}"
                         f"\t{r.distinct_words}\t{r.dict_delta}\n")


def load_report(path: str | Path) -> list[IterationReport]:
    reports = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for line in lines[1:]:
        if not line:
            continue
        iteration, size, extracted, distinct, delta = (int(x) for x in line.split("\t"))
        reports.append(IterationReport(iteration, size, extracted, distinct, delta))
    return reports
