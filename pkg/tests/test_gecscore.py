import random

import pytest

from tgec.gecscore import (
    EditSpan,
    M2Document,
    M2FormatError,
    ScoreError,
    Scores,
    align,
    alignment_cost,
    apply_edits,
    classify,
    count_matches,
    edits_between,
    extract_edits,
    parse_m2,
    postprocess_tweets,
    score,
    write_m2,
)

from oracles import damerau_distance, f_beta


# ---------------------------------------------------------------------------
# Alignment


def test_align_identical():
    ops = align(["a", "b"], ["a", "b"])
    assert [op[0] for op in ops] == ["M", "M"]


def test_align_transposition():
    ops = align(["elma", "kırmızı"], ["kırmızı", "elma"])
    assert [op[0] for op in ops] == ["T"]
    assert alignment_cost(["elma", "kırmızı"], ["kırmızı", "elma"]) == 1


def test_align_case_substitution_discount():
    assert alignment_cost(["matrix"], ["Matrix"]) == 0.5
    assert alignment_cost(["matrix"], ["başka"]) == 1.0


def test_align_cost_matches_damerau_oracle():
    rng = random.Random(61)
    vocab = ["a", "b", "c", "d", "e"]  # lowercase only: no case discounts
    for _ in range(1000):
        src = [rng.choice(vocab) for _ in range(rng.randint(0, 7))]
        tgt = [rng.choice(vocab) for _ in range(rng.randint(0, 7))]
        assert alignment_cost(src, tgt) == damerau_distance(src, tgt), (src, tgt)


def test_align_prefers_match_over_gap_pairs():
    ops = align(["a", "x", "b"], ["a", "y", "b"])
    assert [op[0] for op in ops] == ["M", "S", "M"]


# ---------------------------------------------------------------------------
# Edit extraction


def test_extract_edits_identical_is_empty():
    src = tgt = ["bir", "iki"]
    assert extract_edits(align(src, tgt), src, tgt) == []


def test_extract_edits_broblem():
    src, tgt = ["broblem", "var"], ["problem", "var"]
    edits = extract_edits(align(src, tgt), src, tgt)
    assert len(edits) == 1
    edit = edits[0]
    assert (edit.start, edit.end) == (0, 1)
    assert edit.replacement == ("problem",)
    assert edit.error_type == "SPELL"


def test_extract_edits_merges_adjacent_operations():
    src = ["a", "b", "c", "d"]
    tgt = ["a", "x", "y", "d"]
    edits = edits_between(src, tgt)
    assert len(edits) == 1
    assert (edits[0].start, edits[0].end) == (1, 3)
    assert edits[0].replacement == ("x", "y")


def test_extract_edits_transposition_single_span():
    src = ["elma", "kırmızı"]
    tgt = ["kırmızı", "elma"]
    edits = edits_between(src, tgt)
    assert len(edits) == 1
    assert (edits[0].start, edits[0].end) == (0, 2)
    assert edits[0].error_type == "WO"


def test_extract_edits_insertion_and_deletion():
    edits = edits_between(["bir", "iki"], ["bir", "yeni", "iki"])
    assert [(e.start, e.end, e.replacement) for e in edits] == [(1, 1, ("yeni",))]
    edits = edits_between(["bir", "iki"], ["bir"])
    assert [(e.start, e.end, e.replacement) for e in edits] == [(1, 2, ())]


def test_extract_edits_reconstruction_fuzz():
    rng = random.Random(62)
    vocab = ["bir", "iki", "üç", "dört", "Ev", "ev", ".", ","]
    for _ in range(1000):
        src = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
        tgt = [rng.choice(vocab) for _ in range(rng.randint(0, 8))]
        edits = edits_between(src, tgt)
        assert apply_edits(src, edits) == tgt, (src, tgt)
        previous_end = -1
        for edit in edits:
            assert edit.start > previous_end or (edit.start == edit.end == previous_end)
            assert edit.start >= previous_end
            previous_end = edit.end


# ---------------------------------------------------------------------------
# Classification


def classify_pair(src_span, replacement, src=None):
    src = list(src_span) if src is None else src
    edit = EditSpan(0, len(src_span), tuple(replacement))
    return classify(edit, src)


def test_classify_orth():
    assert classify_pair(["herşey"], ["her", "şey"]) == "ORTH"
    assert classify_pair(["matrix"], ["Matrix"]) == "ORTH"
    assert classify_pair(["İyi"], ["iyi"]) == "ORTH"


def test_classify_punct():
    assert classify_pair(["?"], ["!"]) == "PUNCT"
    assert classify_pair(["."], []) == "PUNCT"
    assert classify_pair([], [","]) == "PUNCT"


def test_classify_word_order():
    assert classify_pair(["elma", "kırmızı"], ["kırmızı", "elma"]) == "WO"


def test_classify_spell():
    assert classify_pair(["broblem"], ["problem"]) == "SPELL"
    assert classify_pair(["geldim"], ["gittim"]) == "SPELL"  # distance 3 rule
    assert classify_pair(["yuzune"], ["yüzüne"]) == "SPELL"


def test_classify_other():
    assert classify_pair(["kalem"], ["bilgisayarlar"]) == "OTHER"
    assert classify_pair([], ["yeni"]) == "OTHER"
    assert classify_pair(["eski"], []) == "OTHER"


def test_classify_total_on_fuzzed_edits():
    rng = random.Random(63)
    vocab = ["bir", "iki", "Üç", ".", "!", "herşey", "her", "şey"]
    for _ in range(500):
        src = [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
        tgt = [rng.choice(vocab) for _ in range(rng.randint(0, 6))]
        for edit in edits_between(src, tgt):
            assert edit.error_type in {"PUNCT", "ORTH", "WO", "SPELL", "OTHER"}


# ---------------------------------------------------------------------------
# M2 serialization


def test_write_m2_single_edit(tmp_path):
    doc = M2Document(("herşey", "iyi"),
                     (EditSpan(0, 1, ("her", "şey"), "ORTH"),))
    path = tmp_path / "one.m2"
    write_m2([doc], path)
    assert path.read_text(encoding="utf-8") == (
        "S herşey iyi\n"
        "A 0 1|||ORTH|||her şey|||REQUIRED|||-NONE-|||0\n"
    )


def test_write_m2_noop_document(tmp_path):
    doc = M2Document(("iyi",), ())
    path = tmp_path / "noop.m2"
    write_m2([doc], path)
    assert path.read_text(encoding="utf-8") == (
        "S iyi\n"
        "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
    )


def test_documents_separated_by_exactly_one_blank_line(tmp_path):
    docs = [M2Document(("a",), ()), M2Document(("b",), ())]
    path = tmp_path / "two.m2"
    write_m2(docs, path)
    assert path.read_text(encoding="utf-8") == (
        "S a\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
        "\n"
        "S b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
    )


def test_parse_m2_round_trip_values(tmp_path):
    docs = [
        M2Document(("broblem", "var"),
                   (EditSpan(0, 1, ("problem",), "SPELL"),)),
        M2Document(("iyi",), ()),
        M2Document(("a", "b"),
                   (EditSpan(1, 2, (), "OTHER"),
                    EditSpan(-1, -1, (), "noop", annotator=1))),
    ]
    path = tmp_path / "docs.m2"
    write_m2(docs, path)
    assert parse_m2(path) == docs


def _random_docs(rng, n):
    vocab = ["bir", "iki", "üç", "ev", "okul", ".", "herşey"]
    types = ["SPELL", "ORTH", "PUNCT", "WO", "OTHER", "R:VERB:TENSE"]
    docs = []
    for _ in range(n):
        tokens = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 10)))
        edits = []
        cursor = 0
        while cursor < len(tokens) and rng.random() < 0.6:
            start = rng.randint(cursor, len(tokens))
            end = rng.randint(start, len(tokens))
            replacement = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 3)))
            if start == end and not replacement:
                cursor = start + 1
                continue
            edits.append(EditSpan(start, end, replacement, rng.choice(types),
                                  annotator=rng.choice((0, 0, 0, 1))))
            cursor = end + 1
        docs.append(M2Document(tokens, tuple(edits)))
    return docs


def test_m2_round_trip_fuzz(tmp_path):
    rng = random.Random(64)
    docs = _random_docs(rng, 100)
    path_a = tmp_path / "a.m2"
    path_b = tmp_path / "b.m2"
    write_m2(docs, path_a)
    parsed = parse_m2(path_a)
    assert parsed == docs
    write_m2(parsed, path_b)
    assert path_a.read_bytes() == path_b.read_bytes()


def test_parse_m2_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "bad.m2"
    path.write_text("S a b\nA 0 1|||SPELL|||x\n", encoding="utf-8")
    with pytest.raises(M2FormatError) as err:
        parse_m2(path)
    assert "line 2" in str(err.value)


def test_parse_m2_rejects_out_of_range_offsets(tmp_path, caplog):
    path = tmp_path / "range.m2"
    path.write_text(
        "S a b\nA 0 5|||SPELL|||x|||REQUIRED|||-NONE-|||0\n\n"
        "S c\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n",
        encoding="utf-8")
    with caplog.at_level("WARNING"):
        docs = parse_m2(path)
    assert len(docs) == 1
    assert docs[0].source_tokens == ("c",)
    assert "out of range" in caplog.text


# ---------------------------------------------------------------------------
# Scoring


def docs_from(*pairs):
    out = []
    for src, tgt in pairs:
        src_tokens = src.split()
        out.append(M2Document(tuple(src_tokens),
                              tuple(edits_between(src_tokens, tgt.split()))))
    return out


def test_gold_vs_gold_is_perfect():
    gold = docs_from(("broblem var", "problem var"), ("iyi", "iyi"))
    for mode in ("span-correction", "span-detection", "token-detection"):
        s = score(gold, gold, mode)
        assert (s.precision, s.recall, s.f_half) == (1.0, 1.0, 1.0)


def test_scores_formula_conventions():
    s = Scores.from_counts(2, 1, 2)
    assert s.precision == pytest.approx(2 / 3)
    assert s.recall == pytest.approx(0.5)
    assert s.f_half == pytest.approx(0.625, abs=1e-9)
    assert Scores.from_counts(0, 0, 5).precision == 1.0
    assert Scores.from_counts(0, 5, 0).recall == 1.0
    assert Scores.from_counts(0, 5, 5).f_half == 0.0
    assert Scores.from_counts(0, 0, 0).f_half == 1.0


def test_scores_match_independent_f_beta():
    rng = random.Random(65)
    for _ in range(500):
        tp, fp, fn = rng.randint(0, 9), rng.randint(0, 9), rng.randint(0, 9)
        s = Scores.from_counts(tp, fp, fn)
        p, r, f = f_beta(tp, fp, fn, beta=0.5)
        assert s.precision == pytest.approx(p)
        assert s.recall == pytest.approx(r)
        assert s.f_half == pytest.approx(f)
        assert 0.0 <= s.precision <= 1.0
        assert 0.0 <= s.recall <= 1.0
        assert 0.0 <= s.f_half <= 1.0
        # F0.5 hits 1 exactly when both components do
        assert (s.f_half == 1.0) == (s.precision == 1.0 and s.recall == 1.0)


def test_span_correction_needs_identical_replacement():
    gold = [M2Document(("a", "b"), (EditSpan(0, 1, ("x",), "OTHER"),))]
    hyp = [M2Document(("a", "b"), (EditSpan(0, 1, ("y",), "OTHER"),))]
    correction = score(gold, hyp, "span-correction")
    assert (correction.tp, correction.fp, correction.fn) == (0, 1, 1)
    detection = score(gold, hyp, "span-detection")
    assert (detection.tp, detection.fp, detection.fn) == (1, 0, 0)


def test_token_detection_counts_overlapping_tokens():
    gold = [M2Document(("a", "b", "c"), (EditSpan(0, 2, ("x",), "OTHER"),))]
    hyp = [M2Document(("a", "b", "c"), (EditSpan(1, 3, ("y",), "OTHER"),))]
    s = score(gold, hyp, "token-detection")
    assert (s.tp, s.fp, s.fn) == (1, 1, 1)  # token 1 overlaps


def test_noop_and_other_annotators_excluded():
    gold = [M2Document(("a",), (EditSpan(-1, -1, (), "noop"),))]
    hyp = [M2Document(("a",), (EditSpan(0, 1, ("b",), "OTHER", annotator=1),))]
    s = score(gold, hyp, "span-correction")
    assert (s.tp, s.fp, s.fn) == (0, 0, 0)
    assert s.f_half == 1.0


def test_score_mismatched_sources_is_fatal():
    gold = [M2Document(("a",), ()), M2Document(("b",), ())]
    hyp = [M2Document(("a",), ()), M2Document(("x",), ())]
    with pytest.raises(ScoreError) as err:
        score(gold, hyp)
    assert "document 1" in str(err.value)
    with pytest.raises(ScoreError):
        score(gold, hyp[:1])


def test_detection_dominates_correction_fuzz():
    rng = random.Random(66)
    vocab = ["bir", "iki", "üç", "ev"]
    for _ in range(1000):
        tokens = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 6)))
        def random_edits():
            edits = []
            cursor = 0
            while cursor < len(tokens):
                start = rng.randint(cursor, len(tokens) - 1)
                end = rng.randint(start, len(tokens))
                replacement = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 2)))
                if (start, end, replacement) != (start, start, ()):
                    edits.append(EditSpan(start, end, replacement, "OTHER"))
                cursor = end + 1
                if rng.random() < 0.5:
                    break
            return tuple(edits)
        gold = [M2Document(tokens, random_edits())]
        hyp = [M2Document(tokens, random_edits())]
        correction = score(gold, hyp, "span-correction")
        detection = score(gold, hyp, "span-detection")
        assert detection.precision >= correction.precision
        assert detection.recall >= correction.recall
        assert detection.tp >= correction.tp
        assert detection.fp <= correction.fp
        assert detection.fn <= correction.fn


def test_count_matches_per_document():
    gold = M2Document(("a", "b"), (EditSpan(0, 1, ("x",), "OTHER"),))
    hyp = M2Document(("a", "b"), (EditSpan(0, 1, ("x",), "OTHER"),
                                  EditSpan(1, 2, ("y",), "OTHER")))
    assert count_matches(gold, hyp, "span-correction") == (1, 1, 0)


# ---------------------------------------------------------------------------
# Tweets post-processing


def test_postprocess_capitalizes_gold_turkish():
    gold, hyp = postprocess_tweets(["iyi misin", "ışık var", "Zaten iyi"], ["", "", ""])
    assert gold == ["İyi misin", "Işık var", "Zaten iyi"]


def test_postprocess_strips_hyp_punctuation():
    gold, hyp = postprocess_tweets([""], ["iyi, misin?"])
    assert hyp == ["iyi misin"]
    # every Unicode punctuation class goes, including # % ' and dashes
    _, hyp = postprocess_tweets([""], ["bu #etiket - %50 'dir !..."])
    assert hyp == ["bu etiket 50 dir"]


def test_postprocess_idempotent():
    gold = ["iyi misin", "Nasılsın"]
    hyp = ["çok, iyi!", "sen. nasılsın?"]
    g1, h1 = postprocess_tweets(gold, hyp)
    g2, h2 = postprocess_tweets(g1, h1)
    assert (g1, h1) == (g2, h2)
