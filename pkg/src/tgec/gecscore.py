"""Span-based evaluation: alignment, edit extraction, M2 files, F0.5.

Parallel sentences are token-aligned with a Damerau-Levenshtein dynamic
program, differences merged into edit spans, spans classified with a
coarse rule cascade, serialized to M2, and scored against a gold M2 file
in three modes: span-based correction, span-based detection, and
token-based detection.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import turkish
from .candidates import GROUP_OF

log = logging.getLogger(__name__)

NOOP_TYPE = "noop"
NOOP_LINE = "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0"

SCORE_MODES = ("span-correction", "span-detection", "token-detection")

# Alignment costs; case-variant substitutions are discounted so that
# case-only rewrites stay single substitution spans.
COST_SUBSTITUTION = 1.0
COST_CASE_SUBSTITUTION = 0.5
COST_GAP = 1.0
COST_TRANSPOSITION = 1.0


class M2FormatError(Exception):
    pass


class ScoreError(Exception):
    pass


@dataclass(frozen=True)
class EditSpan:
    """A token-span rewrite: source[start:end] -> replacement."""

    start: int
    end: int
    replacement: tuple[str, ...]
    error_type: str = "OTHER"
    annotator: int = 0

    @property
    def is_noop(self) -> bool:
        return self.error_type == NOOP_TYPE

    def coverage(self) -> set[int]:
        return set(range(self.start, self.end))


NOOP_EDIT = EditSpan(start=-1, end=-1, replacement=(), error_type=NOOP_TYPE)


@dataclass(frozen=True)
class M2Document:
    source_tokens: tuple[str, ...]
    edits: tuple[EditSpan, ...] = ()

    def scored_edits(self, annotator: int = 0) -> list[EditSpan]:
        return [e for e in self.edits if not e.is_noop and e.annotator == annotator]


@dataclass(frozen=True)
class Scores:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_half: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "Scores":
        precision = tp / (tp + fp) if tp + fp > 0 else 1.0
        recall = tp / (tp + fn) if tp + fn > 0 else 1.0
        if precision == 0.0 and recall == 0.0:
            f_half = 0.0
        else:
            f_half = 1.25 * precision * recall / (0.25 * precision + recall)
        return cls(tp, fp, fn, precision, recall, f_half)


# ---------------------------------------------------------------------------
# Alignment and edit extraction


def align(src_tokens: Sequence[str], tgt_tokens: Sequence[str]) -> list[tuple]:
    """Minimal-cost token alignment. Returns (op, si, sj, ti, tj) segments
    with op in {"M", "S", "D", "I", "T"}; T covers an adjacent
    transposition of two tokens. Ties break match > transposition >
    substitution > deletion > insertion."""
    n, m = len(src_tokens), len(tgt_tokens)
    dist = [[0.0] * (m + 1) for _ in range(n + 1)]
    ops = [[""] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i * COST_GAP
        ops[i][0] = "D"
    for j in range(1, m + 1):
        dist[0][j] = j * COST_GAP
        ops[0][j] = "I"
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            candidates: list[tuple[float, str]] = []
            if src_tokens[i - 1] == tgt_tokens[j - 1]:
                candidates.append((dist[i - 1][j - 1], "M"))
            else:
                if (
                    i > 1 and j > 1
                    and src_tokens[i - 2] == tgt_tokens[j - 1]
                    and src_tokens[i - 1] == tgt_tokens[j - 2]
                    and src_tokens[i - 1] != src_tokens[i - 2]
                ):
                    candidates.append((dist[i - 2][j - 2] + COST_TRANSPOSITION, "T"))
                sub = (
                    COST_CASE_SUBSTITUTION
                    if turkish.fold(src_tokens[i - 1]) == turkish.fold(tgt_tokens[j - 1])
                    else COST_SUBSTITUTION
                )
                candidates.append((dist[i - 1][j - 1] + sub, "S"))
            candidates.append((dist[i - 1][j] + COST_GAP, "D"))
            candidates.append((dist[i][j - 1] + COST_GAP, "I"))
            best_cost = min(cost for cost, _ in candidates)
            best_op = next(op for cost, op in candidates if cost == best_cost)
            dist[i][j] = best_cost
            ops[i][j] = best_op
    segments = []
    i, j = n, m
    while i > 0 or j > 0:
        op = ops[i][j]
        if op == "M" or op == "S":
            segments.append((op, i - 1, i, j - 1, j))
            i, j = i - 1, j - 1
        elif op == "D":
            segments.append((op, i - 1, i, j, j))
            i -= 1
        elif op == "I":
            segments.append((op, i, i, j - 1, j))
            j -= 1
        else:  # T
            segments.append((op, i - 2, i, j - 2, j))
            i, j = i - 2, j - 2
    segments.reverse()
    return segments


def alignment_cost(src_tokens: Sequence[str], tgt_tokens: Sequence[str]) -> float:
    cost = 0.0
    for op, si, sj, ti, tj in align(src_tokens, tgt_tokens):
        if op == "S":
            cost += (
                COST_CASE_SUBSTITUTION
                if turkish.fold(src_tokens[si]) == turkish.fold(tgt_tokens[ti])
                else COST_SUBSTITUTION
            )
        elif op in ("D", "I"):
            cost += COST_GAP
        elif op == "T":
            cost += COST_TRANSPOSITION
    return cost


def extract_edits(
    alignment: Sequence[tuple],
    src_tokens: Sequence[str],
    tgt_tokens: Sequence[str],
    annotator: int = 0,
) -> list[EditSpan]:
    """Merge maximal runs of non-match operations into edit spans; each
    span is classified on extraction. Applying the spans to src yields tgt."""
    edits: list[EditSpan] = []
    run: list[tuple] = []

    def flush() -> None:
        if not run:
            return
        start, end = run[0][1], run[-1][2]
        replacement = tuple(tgt_tokens[run[0][3]:run[-1][4]])
        edit = EditSpan(start=start, end=end, replacement=replacement, annotator=annotator)
        edits.append(EditSpan(start, end, replacement,
                              error_type=classify(edit, src_tokens), annotator=annotator))
        run.clear()

    for segment in alignment:
        if segment[0] == "M":
            flush()
        else:
            run.append(segment)
    flush()
    return edits


def edits_between(
    src_tokens: Sequence[str], tgt_tokens: Sequence[str], annotator: int = 0
) -> list[EditSpan]:
    return extract_edits(align(src_tokens, tgt_tokens), src_tokens, tgt_tokens, annotator)


def apply_edits(src_tokens: Sequence[str], edits: Iterable[EditSpan]) -> list[str]:
    """Apply non-overlapping edits to a token list."""
    out: list[str] = []
    cursor = 0
    for edit in sorted(edits, key=lambda e: (e.start, e.end)):
        if edit.is_noop:
            continue
        out.extend(src_tokens[cursor:edit.start])
        out.extend(edit.replacement)
        cursor = edit.end
    out.extend(src_tokens[cursor:])
    return out


# ---------------------------------------------------------------------------
# Classification


def _is_punct_token(token: str) -> bool:
    return not any(ch.isalnum() for ch in token)


def _char_edit_distance(a: str, b: str) -> int:
    """Plain Levenshtein over characters."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def _deascii_only_diff(a: str, b: str) -> bool:
    if len(a) != len(b) or a == b:
        return False
    for ca, cb in zip(a, b):
        if ca == cb:
            continue
        group = GROUP_OF.get(ca)
        if group is None or cb not in group:
            return False
    return True


def classify(edit: EditSpan, src_tokens: Sequence[str]) -> str:
    """Coarse error type: PUNCT, ORTH, WO, SPELL, or OTHER.

    A 5-type subset of the usual 25-type taxonomy; the full set needs POS
    tagging. Word-choice rewrites within edit distance 3 land in SPELL.
    """
    removed = tuple(src_tokens[edit.start:edit.end])
    inserted = edit.replacement
    changed = removed + inserted
    if changed and all(_is_punct_token(t) for t in changed):
        return "PUNCT"
    if removed and inserted and \
            turkish.fold("".join(removed)) == turkish.fold("".join(inserted)):
        return "ORTH"
    if len(removed) >= 2 and removed != inserted and \
            sorted(turkish.fold(t) for t in removed) == sorted(turkish.fold(t) for t in inserted):
        return "WO"
    if len(removed) == 1 and len(inserted) == 1:
        if _char_edit_distance(removed[0], inserted[0]) <= 3:
            return "SPELL"
        if _deascii_only_diff(removed[0], inserted[0]):
            return "SPELL"
    return "OTHER"


# ---------------------------------------------------------------------------
# M2 serialization


def _format_edit(edit: EditSpan) -> str:
    replacement = " ".join(edit.replacement) if edit.replacement else "-NONE-"
    return (f"A {edit.start} {edit.end}|||{edit.error_type}|||{replacement}"
            f"|||REQUIRED|||-NONE-|||{edit.annotator}")


def format_m2(docs: Iterable[M2Document]) -> str:
    blocks = []
    for doc in docs:
        lines = ["S " + " ".join(doc.source_tokens) if doc.source_tokens else "S"]
        if doc.edits:
            lines.extend(_format_edit(e) for e in doc.edits)
        else:
            lines.append(NOOP_LINE)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def write_m2(docs: Iterable[M2Document], path: str | Path) -> None:
    Path(path).write_text(format_m2(docs), encoding="utf-8")


def _parse_edit_line(line: str, line_no: int) -> EditSpan:
    body = line[2:]
    fields = body.split("|||")
    if len(fields) != 6:
        raise M2FormatError(f"line {line_no}: expected 6 |||-separated fields, got {len(fields)}")
    span = fields[0].split()
    if len(span) != 2:
        raise M2FormatError(f"line {line_no}: bad span field {fields[0]!r}")
    try:
        start, end = int(span[0]), int(span[1])
        annotator = int(fields[5])
    except ValueError:
        raise M2FormatError(f"line {line_no}: non-integer offset or annotator") from None
    error_type = fields[1]
    if error_type == NOOP_TYPE:
        return EditSpan(-1, -1, (), NOOP_TYPE, annotator)
    replacement = () if fields[2] in ("-NONE-", "") else tuple(fields[2].split(" "))
    return EditSpan(start, end, replacement, error_type, annotator)


def parse_m2(path: str | Path) -> list[M2Document]:
    """Parse an M2 file. Malformed lines raise with their line number;
    documents with out-of-range offsets are rejected and reported."""
    docs: list[M2Document] = []
    source: Optional[tuple[str, ...]] = None
    edits: list[EditSpan] = []
    block_start = 0
    rejected = 0

    def close_block() -> None:
        nonlocal source, edits, rejected
        if source is None:
            return
        n = len(source)
        bad = [e for e in edits if not e.is_noop and not (0 <= e.start <= e.end <= n)]
        if bad:
            rejected += 1
            log.warning("rejected M2 document at line %d: edit offsets out of range "
                        "for %d source tokens", block_start, n)
        else:
            # A lone default noop line is the distinguished encoding of
            # "no edits"; explicit noops from other annotators are kept.
            if edits == [NOOP_EDIT]:
                edits = []
            docs.append(M2Document(tuple(source), tuple(edits)))
        source, edits = None, []

    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                close_block()
                continue
            if line == "S" or line.startswith("S "):
                if source is not None:
                    close_block()
                source = tuple(line[2:].split(" ")) if len(line) > 2 else ()
                block_start = line_no
            elif line.startswith("A "):
                if source is None:
                    raise M2FormatError(f"line {line_no}: edit line before any source line")
                edits.append(_parse_edit_line(line, line_no))
            else:
                raise M2FormatError(f"line {line_no}: unrecognized line {line!r}")
    close_block()
    if rejected:
        log.warning("parse_m2: rejected %d document(s) with out-of-range offsets", rejected)
    return docs


# ---------------------------------------------------------------------------
# Scoring


def _span_units(doc: M2Document, mode: str) -> set:
    edits = doc.scored_edits()
    if mode == "span-correction":
        return {(e.start, e.end, e.replacement) for e in edits}
    if mode == "span-detection":
        return {(e.start, e.end) for e in edits}
    if mode == "token-detection":
        covered: set[int] = set()
        for e in edits:
            covered |= e.coverage()
        return covered
    raise ValueError(f"unknown scoring mode {mode!r} (expected one of {SCORE_MODES})")


def count_matches(gold: M2Document, hyp: M2Document, mode: str) -> tuple[int, int, int]:
    gold_units = _span_units(gold, mode)
    hyp_units = _span_units(hyp, mode)
    tp = len(gold_units & hyp_units)
    return tp, len(hyp_units) - tp, len(gold_units) - tp


def score(gold_docs: Sequence[M2Document], hyp_docs: Sequence[M2Document],
          mode: str = "span-correction") -> Scores:
    """Corpus-level P/R/F0.5 for the given mode. Counts are accumulated
    per document, so gold and hypothesis must describe the same sources."""
    if mode not in SCORE_MODES:
        raise ValueError(f"unknown scoring mode {mode!r} (expected one of {SCORE_MODES})")
    if len(gold_docs) != len(hyp_docs):
        raise ScoreError(
            f"document count mismatch: gold has {len(gold_docs)}, hypothesis {len(hyp_docs)}")
    tp = fp = fn = 0
    for i, (gold, hyp) in enumerate(zip(gold_docs, hyp_docs)):
        if gold.source_tokens != hyp.source_tokens:
            raise ScoreError(f"source tokens differ at document {i}")
        dtp, dfp, dfn = count_matches(gold, hyp, mode)
        tp, fp, fn = tp + dtp, fp + dfp, fn + dfn
    return Scores.from_counts(tp, fp, fn)


# ---------------------------------------------------------------------------
# Tweets post-processing


def _strip_punct(text: str) -> str:
    kept = "".join(ch for ch in text if not unicodedata.category(ch).startswith("P"))
    return " ".join(kept.split())


def postprocess_tweets(
    gold_sentences: Sequence[str], hyp_sentences: Sequence[str]
) -> tuple[list[str], list[str]]:
    """Level the tweets evaluation field: capitalize gold sentence starts
    (Turkish-aware) and strip punctuation out of the hypotheses."""
    gold = [turkish.capitalize(s) for s in gold_sentences]
    hyp = [_strip_punct(s) for s in hyp_sentences]
    return gold, hyp
