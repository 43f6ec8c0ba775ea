"""Analyzability oracle: is a surface word a well-formed Turkish word?

Both candidate generators filter through this check. Instead of a full
morphological analyzer we use a wordlist plus a small, data-driven suffix
rule set: a word is analyzable when it is in the lexicon, or when it is
lexicon-stem + a chain of applicable suffixes (bounded depth). The
interface is stable, so a real analyzer can be dropped in behind it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Iterable, Sequence

VOWELS = "aeıioöuü"
BACK_VOWELS = "aıou"
FRONT_VOWELS = "eiöü"

DEFAULT_CHAIN_DEPTH = 4
MIN_STEM_LEN = 2


class MorphologyError(Exception):
    """Raised when oracle data files cannot be loaded."""


def _last_vowel(stem: str) -> str:
    for ch in reversed(stem):
        if ch in VOWELS:
            return ch
    return ""


def _pred_always(stem: str) -> bool:
    return True


def _pred_back_vowel_stem(stem: str) -> bool:
    return _last_vowel(stem) in BACK_VOWELS


def _pred_front_vowel_stem(stem: str) -> bool:
    return _last_vowel(stem) in FRONT_VOWELS


PREDICATES: dict[str, Callable[[str], bool]] = {
    "always": _pred_always,
    "back_vowel_stem": _pred_back_vowel_stem,
    "front_vowel_stem": _pred_front_vowel_stem,
}


class AnalyzabilityOracle:
    """Pure, immutable verdict function over a lexicon and suffix rules."""

    def __init__(
        self,
        lexicon: Iterable[str],
        suffix_rules: Sequence[tuple[str, str]] = (),
        chain_depth: int = DEFAULT_CHAIN_DEPTH,
    ):
        self.lexicon = frozenset(word.strip() for word in lexicon if word.strip())
        for _suffix, pred in suffix_rules:
            if pred not in PREDICATES:
                raise MorphologyError(f"unknown suffix predicate {pred!r}")
        self.suffix_rules = tuple(suffix_rules)
        self.chain_depth = chain_depth
        self._cache: dict[str, bool] = {}

    def is_analyzable(self, word: str) -> bool:
        """True iff word is in the lexicon or decomposes into a lexicon stem
        plus a chain of at most chain_depth applicable suffixes."""
        if not word:
            return False
        cached = self._cache.get(word)
        if cached is None:
            cached = self._analyze(word, self.chain_depth)
            self._cache[word] = cached
        return cached

    def _analyze(self, word: str, depth: int) -> bool:
        if word in self.lexicon:
            return True
        if depth == 0:
            return False
        for suffix, pred in self.suffix_rules:
            if not word.endswith(suffix):
                continue
            stem = word[: -len(suffix)]
            if len(stem) < MIN_STEM_LEN:
                continue
            if PREDICATES[pred](stem) and self._analyze(stem, depth - 1):
                return True
        return False

    @classmethod
    def from_files(
        cls,
        lexicon_path: str | Path,
        suffix_rules_path: str | Path | None = None,
        chain_depth: int = DEFAULT_CHAIN_DEPTH,
    ) -> "AnalyzabilityOracle":
        lexicon = load_wordlist(lexicon_path)
        rules = load_suffix_rules(suffix_rules_path) if suffix_rules_path else ()
        return cls(lexicon, rules, chain_depth)


def load_lexicon(
    path: str | Path,
    suffix_rules_path: str | Path | None = None,
    chain_depth: int = DEFAULT_CHAIN_DEPTH,
) -> AnalyzabilityOracle:
    """Build an oracle from a word-per-line lexicon file."""
    return AnalyzabilityOracle.from_files(path, suffix_rules_path, chain_depth)


def load_wordlist(path: str | Path) -> set[str]:
    """One surface form per line; duplicates collapse."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MorphologyError(f"cannot read lexicon file {path}: {exc}") from exc
    return {line.strip() for line in lines if line.strip()}


def load_suffix_rules(path: str | Path) -> tuple[tuple[str, str], ...]:
    """TSV rows suffix<TAB>predicate-name, in application priority order."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MorphologyError(f"cannot read suffix rules file {path}: {exc}") from exc
    rules = []
    for row, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MorphologyError(f"{path}: malformed suffix rule at row {row}: {line!r}")
        suffix, pred = parts
        if pred not in PREDICATES:
            raise MorphologyError(f"{path}: unknown predicate {pred!r} at row {row}")
        rules.append((suffix, pred))
    return tuple(rules)


def default_oracle(lexicon_path: str | Path | None = None) -> AnalyzabilityOracle:
    """Oracle over the given (or bundled toy) lexicon and the bundled
    suffix rules."""
    from .resources import suffix_rules_path, toy_lexicon_path

    return AnalyzabilityOracle.from_files(
        lexicon_path or toy_lexicon_path(), suffix_rules_path()
    )
