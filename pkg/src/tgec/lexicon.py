"""The spelling dictionary: incorrect -> correct word/phrase pairs.

Entries map an incorrect token sequence (1..5 tokens) to its correction,
tagged with where it came from (manual seed, deasciifier, spellchecker,
llm) and the expansion iteration that added it. Merging never overwrites:
the first entry for a key wins and later rivals are counted as conflicts.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import turkish

PROVENANCES = ("manual", "deasciifier", "spellchecker", "llm")
MAX_KEY_TOKENS = 5

TokenSeq = tuple[str, ...]


class LexiconError(Exception):
    """Raised for unusable dictionary files or entries."""


@dataclass(frozen=True)
class SpellingEntry:
    incorrect: TokenSeq
    correct: TokenSeq
    provenance: str
    iteration: int = 0

    def validate(self) -> Optional[str]:
        """Return a reason string if the entry violates an invariant."""
        if not self.incorrect or not self.correct:
            return "empty side"
        if self.incorrect == self.correct:
            return "incorrect equals correct"
        if any(not tok or any(c.isspace() for c in tok)
               for tok in self.incorrect + self.correct):
            return "empty or whitespace-bearing token"
        if self.provenance not in PROVENANCES:
            return f"unknown provenance {self.provenance!r}"
        if self.iteration < 0:
            return "negative iteration"
        if len(self.incorrect) > MAX_KEY_TOKENS:
            return f"key longer than {MAX_KEY_TOKENS} tokens"
        return None


@dataclass(frozen=True)
class LookupMatch:
    entry: SpellingEntry
    length: int
    folded: bool  # matched via the case-folded fallback

    def replacement_for(self, source_tokens: Sequence[str]) -> TokenSeq:
        """The correction tokens, with the source token's initial capital
        transferred when the match was case-folded."""
        correction = self.entry.correct
        if self.folded and source_tokens and source_tokens[0][:1].isupper():
            correction = (turkish.capitalize(correction[0]),) + correction[1:]
        return correction


@dataclass(frozen=True)
class MergeResult:
    dictionary: "SpellingDictionary"
    added: int
    conflicts: int
    rejected: int = 0


class SpellingDictionary:
    """Immutable snapshot of incorrect -> SpellingEntry. merge() returns a
    new snapshot (copy-on-write); readers can share one freely."""

    def __init__(self, entries: Optional[dict[TokenSeq, SpellingEntry]] = None):
        self._entries: dict[TokenSeq, SpellingEntry] = dict(entries or {})
        # Sorted so that which cased key backs a folded key is deterministic.
        self._folded: dict[TokenSeq, SpellingEntry] = {}
        for key in sorted(self._entries):
            folded_key = tuple(turkish.fold(tok) for tok in key)
            self._folded.setdefault(folded_key, self._entries[key])
        self._max_key_len = max((len(k) for k in self._entries), default=0)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: TokenSeq) -> bool:
        return key in self._entries

    def get(self, key: TokenSeq) -> Optional[SpellingEntry]:
        return self._entries.get(key)

    @property
    def max_key_len(self) -> int:
        return self._max_key_len

    def entries(self) -> list[SpellingEntry]:
        """All entries in canonical order (lexicographic by key)."""
        return [self._entries[key] for key in sorted(self._entries)]

    def keys(self) -> list[TokenSeq]:
        return sorted(self._entries)

    def merge(self, pairs: Iterable[SpellingEntry]) -> MergeResult:
        """Add novel pairs; existing keys are never overwritten. Pairs that
        violate entry invariants are rejected (counted, not fatal)."""
        entries = dict(self._entries)
        added = conflicts = rejected = 0
        for pair in pairs:
            if pair.validate() is not None:
                rejected += 1
                continue
            if pair.incorrect in entries:
                conflicts += 1
                continue
            entries[pair.incorrect] = pair
            added += 1
        return MergeResult(SpellingDictionary(entries), added, conflicts, rejected)

    def lookup_longest(self, tokens: Sequence[str], start: int) -> Optional[LookupMatch]:
        """Longest dictionary key matching tokens[start:...]; exact match
        preferred over case-folded at equal length; None if nothing matches."""
        if not 0 <= start < len(tokens):
            raise IndexError(f"start {start} out of range")
        limit = min(self._max_key_len, len(tokens) - start)
        for k in range(limit, 0, -1):
            window = tuple(tokens[start:start + k])
            entry = self._entries.get(window)
            if entry is not None:
                return LookupMatch(entry, k, folded=False)
            folded = self._folded.get(tuple(turkish.fold(t) for t in window))
            if folded is not None:
                return LookupMatch(folded, k, folded=True)
        return None


@dataclass
class LoadResult:
    dictionary: SpellingDictionary
    conflicts: list[str] = field(default_factory=list)
    rejected: list[str] = field(default_factory=list)


def _parse_row(row: int, line: str) -> SpellingEntry:
    parts = line.split("\t")
    if len(parts) != 4:
        raise LexiconError(f"row {row}: expected 4 tab-separated fields, got {len(parts)}")
    incorrect, correct, provenance, iteration = parts
    try:
        iteration_n = int(iteration)
    except ValueError:
        raise LexiconError(f"row {row}: iteration is not an integer: {iteration!r}") from None
    return SpellingEntry(
        incorrect=tuple(unicodedata.normalize("NFC", incorrect).split(" ")) if incorrect else (),
        correct=tuple(unicodedata.normalize("NFC", correct).split(" ")) if correct else (),
        provenance=provenance,
        iteration=iteration_n,
    )


def load_dictionary(path: str | Path) -> LoadResult:
    """Load a dictionary TSV (incorrect<TAB>correct<TAB>provenance<TAB>iteration).

    Malformed or invariant-violating rows are rejected with row numbers;
    duplicate keys keep the first entry and record a conflict.
    """
    result = LoadResult(SpellingDictionary())
    entries: dict[TokenSeq, SpellingEntry] = {}
    with open(path, encoding="utf-8") as handle:
        for row, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                entry = _parse_row(row, line)
            except LexiconError as exc:
                result.rejected.append(str(exc))
                continue
            reason = entry.validate()
            if reason is not None:
                result.rejected.append(f"row {row}: {reason}")
                continue
            if entry.incorrect in entries:
                result.conflicts.append(f"row {row}: duplicate key {' '.join(entry.incorrect)!r}")
                continue
            entries[entry.incorrect] = entry
    result.dictionary = SpellingDictionary(entries)
    return result


def save_dictionary(dictionary: SpellingDictionary, path: str | Path) -> None:
    """Write the canonical TSV form: NFC, sorted lexicographically by key."""
    with open(path, "w", encoding="utf-8") as handle:
        for entry in dictionary.entries():
            handle.write("\t".join((
                unicodedata.normalize("NFC", " ".join(entry.incorrect)),
                unicodedata.normalize("NFC", " ".join(entry.correct)),
                entry.provenance,
                str(entry.iteration),
            )) + "\n")
