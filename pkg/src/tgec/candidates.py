"""Word-level correctors: deasciifier and spell checker.

The deasciifier enumerates every combination of Turkish-specific
characters over the ambiguous positions of a word (s/ş, i/ı, ...). The
spell checker enumerates all strings one Damerau-Levenshtein edit away
(adjacent swap, deletion, substitution, insertion) over the Turkish
alphabet plus apostrophe. Both keep only candidates the analyzability
oracle accepts, and a word is resolved only when the applicable
generator yields exactly one candidate.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

from . import turkish
from .lexicon import SpellingEntry
from .morphology import AnalyzabilityOracle

log = logging.getLogger(__name__)

# Character equivalence groups for deasciification; ö/Ö included with the
# other Turkish-specific letters.
AMBIGUOUS_GROUPS: tuple[tuple[str, str], ...] = (
    ("c", "ç"), ("g", "ğ"), ("i", "ı"), ("o", "ö"), ("s", "ş"), ("u", "ü"),
    ("C", "Ç"), ("G", "Ğ"), ("I", "İ"), ("O", "Ö"), ("S", "Ş"), ("U", "Ü"),
)

GROUP_OF: dict[str, tuple[str, str]] = {
    ch: group for group in AMBIGUOUS_GROUPS for ch in group
}

# Insert/substitute alphabet: 29 Turkish letters plus apostrophe
# (corrections like Matrixten -> Matrix'ten need it).
EDIT_ALPHABET = turkish.ALPHABET + "'"

DEFAULT_COMBINATION_CAP = 12


@dataclass(frozen=True)
class CandidateSet:
    source: str
    candidates: tuple[str, ...]  # distinct, lexicographic, source excluded
    generator: str  # "deasciifier" | "spellchecker"

    def __len__(self) -> int:
        return len(self.candidates)


def ambiguous_positions(word: str) -> list[int]:
    return [i for i, ch in enumerate(word) if ch in GROUP_OF]


def deasciify_variants(word: str) -> set[str]:
    """All words obtained by independently replacing each ambiguous-group
    character with any member of its group; the word itself is excluded."""
    positions = ambiguous_positions(word)
    if not positions:
        return set()
    chars = list(word)
    variants = set()
    for combo in itertools.product(*(GROUP_OF[word[i]] for i in positions)):
        for pos, ch in zip(positions, combo):
            chars[pos] = ch
        variants.add("".join(chars))
    variants.discard(word)
    return variants


def deasciify_candidates(
    word: str,
    oracle: AnalyzabilityOracle,
    cap: int = DEFAULT_COMBINATION_CAP,
) -> CandidateSet:
    """Analyzable deasciification variants of word. Words with more than
    cap ambiguous positions are skipped (combinatorial cap)."""
    k = len(ambiguous_positions(word))
    if k > cap:
        log.warning("combinatorial cap: %r has %d ambiguous positions (cap %d), skipped",
                    word, k, cap)
        return CandidateSet(word, (), "deasciifier")
    accepted = sorted(
        v for v in deasciify_variants(word) if oracle.is_analyzable(turkish.fold(v))
    )
    return CandidateSet(word, tuple(accepted), "deasciifier")


def distance_one_variants(word: str, alphabet: str = EDIT_ALPHABET) -> set[str]:
    """All strings at Damerau-Levenshtein distance exactly 1 from word
    reachable with the given alphabet: adjacent transpositions, single
    deletions, substitutions, and insertions."""
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    variants = set()
    variants.update(left + right[1:] for left, right in splits if right)
    variants.update(
        left + right[1] + right[0] + right[2:]
        for left, right in splits if len(right) > 1
    )
    variants.update(
        left + ch + right[1:] for left, right in splits if right for ch in alphabet
    )
    variants.update(left + ch + right for left, right in splits for ch in alphabet)
    variants.discard(word)
    return variants


def spell_candidates(
    word: str,
    oracle: AnalyzabilityOracle,
    alphabet: str = EDIT_ALPHABET,
) -> CandidateSet:
    """Analyzable words one edit away from word."""
    accepted = sorted(
        v for v in distance_one_variants(word, alphabet)
        if oracle.is_analyzable(turkish.fold(v))
    )
    return CandidateSet(word, tuple(accepted), "spellchecker")


def resolve_unique(
    word: str,
    oracle: AnalyzabilityOracle,
    iteration: int = 0,
    cap: int = DEFAULT_COMBINATION_CAP,
) -> Optional[SpellingEntry]:
    """Correct a broken word if exactly one candidate survives.

    The deasciifier runs first; the spell checker is consulted only when
    deasciification finds nothing at all. Analyzable input words are left
    alone (nothing to correct)."""
    if oracle.is_analyzable(turkish.fold(word)):
        return None
    deascii = deasciify_candidates(word, oracle, cap=cap)
    if len(deascii) == 1:
        return SpellingEntry(
            incorrect=(word,), correct=(deascii.candidates[0],),
            provenance="deasciifier", iteration=iteration,
        )
    if len(deascii) > 1:
        return None
    spell = spell_candidates(word, oracle)
    if len(spell) == 1:
        return SpellingEntry(
            incorrect=(word,), correct=(spell.candidates[0],),
            provenance="spellchecker", iteration=iteration,
        )
    return None
