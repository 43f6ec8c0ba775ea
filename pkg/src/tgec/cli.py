"""Command-line interface: one subcommand per pipeline stage.

Stages are independently useful: `index` and `expand` build the expanded
spelling dictionary, `insert` synthesizes the parallel corpus, `m2` and
`score` evaluate corrections, `annotate` drives an LLM endpoint, and
`stats` summarizes corpora and dictionaries. A TOML config file can hold
the recurring paths and knobs; command-line flags override it.

Exit codes: 0 success, 1 usage error, 2 data/config error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import annotate as annotate_mod
from . import corpus as corpus_mod
from . import expansion, gecscore, inserter, lexicon, reports, turkish
from .morphology import AnalyzabilityOracle, MorphologyError
from .resources import (
    abbreviations_path,
    suffix_rules_path,
    toy_corpus_path,
    toy_lexicon_path,
    toy_seed_dictionary_path,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Config handling


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"malformed config file {path}: {exc}") from exc


def _cfg(config: dict, section: str, key: str, default=None):
    return config.get(section, {}).get(key, default)


def _pick(flag_value, config: dict, section: str, key: str, default=None):
    if flag_value is not None:
        return flag_value
    return _cfg(config, section, key, default)


def _require_file(path, what: str) -> Path:
    if path is None:
        raise UsageError(f"missing required input: {what}")
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{what} does not exist: {p}")
    return p


def _positive(value, what: str) -> int:
    value = int(value)
    if value < 1:
        raise DataError(f"{what} must be positive, got {value}")
    return value


def _build_oracle(lexicon_file, rules_file) -> AnalyzabilityOracle:
    try:
        return AnalyzabilityOracle.from_files(lexicon_file, rules_file)
    except MorphologyError as exc:
        raise DataError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Subcommand implementations


def _cmd_index(args, config: dict) -> int:
    corpus_file = _require_file(_pick(args.corpus, config, "paths", "corpus"), "corpus")
    docs = corpus_mod.read_documents(corpus_file, jsonl=args.jsonl)
    index = corpus_mod.build_word_index(docs, workers=args.workers)
    corpus_mod.save_word_index(index, args.output)
    print(f"indexed {len(docs)} documents, {len(index)} distinct words -> {args.output}")
    return EXIT_OK


def _cmd_expand(args, config: dict) -> int:
    corpus_file = _require_file(_pick(args.corpus, config, "paths", "corpus"), "corpus")
    seed_file = _require_file(
        _pick(args.seed_dict, config, "paths", "seed_dictionary"), "seed dictionary")
    lexicon_file = _require_file(_pick(args.lexicon, config, "paths", "lexicon"), "lexicon")
    rules_file = _pick(args.suffix_rules, config, "paths", "suffix_rules",
                       str(suffix_rules_path()))
    max_iterations = _positive(
        _pick(args.max_iterations, config, "expansion", "max_iterations",
              expansion.DEFAULT_MAX_ITERATIONS), "max iterations")
    deasciify_cap = _positive(
        _pick(args.deasciify_cap, config, "candidates", "deasciify_cap", 12),
        "deasciifier cap")
    output_dir = Path(_pick(args.output_dir, config, "paths", "output_dir", "."))
    output_dir.mkdir(parents=True, exist_ok=True)

    docs = corpus_mod.read_documents(corpus_file, jsonl=args.jsonl)
    loaded = lexicon.load_dictionary(seed_file)
    for issue in loaded.conflicts + loaded.rejected:
        print(f"seed dictionary: {issue}", file=sys.stderr)
    if len(loaded.dictionary) == 0:
        raise DataError(f"seed dictionary {seed_file} has no usable entries")
    oracle = _build_oracle(lexicon_file, rules_file)
    index = corpus_mod.build_word_index(docs, workers=args.workers)

    run = expansion.expand_to_fixpoint(
        loaded.dictionary, index, docs, oracle,
        max_iterations=max_iterations, deasciify_cap=deasciify_cap)

    report_path = output_dir / "expansion_report.tsv"
    dict_path = output_dir / "expanded_dictionary.tsv"
    expansion.save_report(run.reports, report_path)
    lexicon.save_dictionary(run.final_dictionary, dict_path)
    written = [report_path, dict_path]
    if not args.no_figures:
        written += reports.render_expansion_figures(run.reports, output_dir)
    state = "converged" if run.converged else "NOT converged (iteration cap hit)"
    print(f"{len(run.reports)} iterations, {state}; dictionary "
          f"{run.reports[0].dict_size} -> {len(run.final_dictionary)} entries; "
          f"{len(run.extracted_ids)} documents extracted")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _split_corpus_to_sentences(docs, abbreviations) -> list[str]:
    sentences = []
    for doc in docs:
        sentences.extend(corpus_mod.split_sentences(doc.text, abbreviations))
    return corpus_mod.dedup(sentences)


def _cmd_insert(args, config: dict) -> int:
    input_file = _require_file(args.input, "input text")
    dict_file = _require_file(_pick(args.dict, config, "paths", "dictionary"), "dictionary")
    loaded = lexicon.load_dictionary(dict_file)
    if len(loaded.dictionary) == 0:
        raise DataError(f"dictionary {dict_file} has no usable entries")
    docs = corpus_mod.read_documents(input_file, jsonl=args.jsonl)
    if args.no_split:
        sentences = corpus_mod.dedup(doc.text for doc in docs)
    else:
        abbrev_file = _pick(args.abbreviations, config, "paths", "abbreviations",
                            str(abbreviations_path()))
        abbreviations = corpus_mod.load_abbreviations(_require_file(abbrev_file, "abbreviations"))
        sentences = _split_corpus_to_sentences(docs, abbreviations)
    pairs = inserter.build_parallel_corpus(sentences, loaded.dictionary, workers=args.workers)
    inserter.save_pairs(pairs, args.output)
    edited = sum(1 for p in pairs if p.edits)
    print(f"{len(pairs)} pairs written to {args.output} ({edited} with edits)")
    if args.m2:
        gecscore.write_m2(inserter.pairs_to_m2_documents(pairs), args.m2)
        print(f"edit sidecar written to {args.m2}")
    return EXIT_OK


def _cmd_annotate(args, config: dict) -> int:
    input_file = _require_file(args.input, "input sentences")
    endpoint = annotate_mod.EndpointConfig(
        base_url=_pick(args.base_url, config, "annotation", "base_url", ""),
        model=_pick(args.model, config, "annotation", "model", "gpt-4"),
        api_key_env=_pick(args.api_key_env, config, "annotation", "api_key_env", ""),
        timeout=float(_cfg(config, "annotation", "timeout", 30.0)),
        max_attempts=_positive(_cfg(config, "annotation", "max_attempts", 3), "max attempts"),
        backoff_base=float(_cfg(config, "annotation", "backoff_base", 0.5)),
        concurrency=_positive(_pick(args.concurrency, config, "annotation", "concurrency", 4),
                              "concurrency"),
    )
    if not endpoint.base_url:
        raise UsageError("annotation endpoint base URL is required (--base-url or config)")
    prompt = _cfg(config, "annotation", "prompt", annotate_mod.DEFAULT_PROMPT)
    lines = [corpus_mod.normalize(line) for line in
             Path(input_file).read_text(encoding="utf-8").splitlines()]
    sentences = tuple((str(i), line) for i, line in enumerate(lines) if line)
    job = annotate_mod.AnnotationJob(
        sentences=sentences, endpoint=endpoint,
        checkpoint_path=Path(args.checkpoint), prompt_template=prompt)
    try:
        records = annotate_mod.annotate_batch(job)
    except annotate_mod.AnnotationConfigError as exc:
        raise DataError(str(exc)) from exc
    exported, rejected = annotate_mod.export_pairs(records, args.output, args.rejects)
    print(f"{exported} pairs -> {args.output}; {rejected} rejects -> {args.rejects}")
    return EXIT_OK


def _cmd_m2(args, config: dict) -> int:
    input_file = _require_file(args.input, "parallel TSV")
    try:
        pairs = inserter.load_pairs(input_file)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    docs = []
    for source, corrected in pairs:
        src_tokens = corpus_mod.tokenize_words(corpus_mod.normalize(source))
        tgt_tokens = corpus_mod.tokenize_words(corpus_mod.normalize(corrected))
        edits = gecscore.edits_between(src_tokens, tgt_tokens)
        docs.append(gecscore.M2Document(tuple(src_tokens), tuple(edits)))
    gecscore.write_m2(docs, args.output)
    print(f"{len(docs)} documents -> {args.output}")
    return EXIT_OK


def _cmd_score(args, config: dict) -> int:
    gold_file = _require_file(args.gold, "gold M2 file")
    hyp_file = _require_file(args.hyp, "hypothesis M2 file")
    mode = _pick(args.mode, config, "scorer", "mode", "span-correction")
    if mode not in gecscore.SCORE_MODES:
        raise UsageError(f"unknown mode {mode!r}; choose from {', '.join(gecscore.SCORE_MODES)}")
    try:
        gold = gecscore.parse_m2(gold_file)
        hyp = gecscore.parse_m2(hyp_file)
        scores = gecscore.score(gold, hyp, mode)
    except (gecscore.M2FormatError, gecscore.ScoreError) as exc:
        raise DataError(str(exc)) from exc
    print("TP\tFP\tFN\tPrecision\tRecall\tF0.5")
    print(f"{scores.tp}\t{scores.fp}\t{scores.fn}\t{scores.precision:.4f}"
          f"\t{scores.recall:.4f}\t{scores.f_half:.4f}")
    if args.report_dir:
        report_dir = Path(args.report_dir)
        report_dir.mkdir(parents=True, exist_ok=True)
        tsv = report_dir / "scores.tsv"
        with open(tsv, "w", encoding="utf-8") as handle:
            handle.write("mode\ttp\tfp\tfn\tprecision\trecall\tf_half\n")
            handle.write(f"{mode}\t{scores.tp}\t{scores.fp}\t{scores.fn}"
                         f"\t{scores.precision:.4f}\t{scores.recall:.4f}"
                         f"\t{scores.f_half:.4f}\n")
        figure = reports.render_score_figure(scores, mode, report_dir / "scores.png")
        print(f"wrote {tsv}", file=sys.stderr)
        print(f"wrote {figure}", file=sys.stderr)
    return EXIT_OK


def _cmd_postprocess_tweets(args, config: dict) -> int:
    gold_file = _require_file(args.gold, "gold sentences")
    hyp_file = _require_file(args.hyp, "hypothesis sentences")
    gold = Path(gold_file).read_text(encoding="utf-8").splitlines()
    hyp = Path(hyp_file).read_text(encoding="utf-8").splitlines()
    if len(gold) != len(hyp):
        raise DataError(f"gold has {len(gold)} lines, hypothesis {len(hyp)}")
    gold_out, hyp_out = gecscore.postprocess_tweets(gold, hyp)
    Path(args.gold_out).write_text("\n".join(gold_out) + "\n", encoding="utf-8")
    Path(args.hyp_out).write_text("\n".join(hyp_out) + "\n", encoding="utf-8")
    print(f"wrote {args.gold_out} and {args.hyp_out}")
    return EXIT_OK


def _cmd_stats(args, config: dict) -> int:
    rows: list[tuple[str, str]] = []
    if not args.corpus and not args.dict:
        raise UsageError("stats needs --corpus and/or --dict")
    if args.corpus:
        corpus_file = _require_file(args.corpus, "corpus")
        docs = corpus_mod.read_documents(corpus_file, jsonl=args.jsonl)
        tokens = 0
        words = set()
        sentences = 0
        abbreviations = corpus_mod.default_abbreviations()
        for doc in docs:
            doc_tokens = corpus_mod.tokenize_words(doc.text)
            tokens += len(doc_tokens)
            words.update(turkish.fold(t) for t in doc_tokens
                         if any(c.isalpha() for c in t))
            sentences += len(corpus_mod.split_sentences(doc.text, abbreviations))
        rows += [
            ("corpus.documents", str(len(docs))),
            ("corpus.sentences", str(sentences)),
            ("corpus.tokens", str(tokens)),
            ("corpus.distinct_words", str(len(words))),
        ]
    if args.dict:
        dict_file = _require_file(args.dict, "dictionary")
        loaded = lexicon.load_dictionary(dict_file)
        entries = loaded.dictionary.entries()
        by_provenance = {p: 0 for p in lexicon.PROVENANCES}
        multi_key = 0
        max_iteration = 0
        for entry in entries:
            by_provenance[entry.provenance] += 1
            multi_key += len(entry.incorrect) > 1
            max_iteration = max(max_iteration, entry.iteration)
        rows += [
            ("dictionary.entries", str(len(entries))),
            ("dictionary.multi_token_keys", str(multi_key)),
            ("dictionary.max_iteration", str(max_iteration)),
            ("dictionary.load_conflicts", str(len(loaded.conflicts))),
            ("dictionary.load_rejected", str(len(loaded.rejected))),
        ]
        rows += [(f"dictionary.provenance.{p}", str(n)) for p, n in by_provenance.items()]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            for name, value in rows:
                handle.write(f"{name}\t{value}\n")
        print(f"wrote {args.output}", file=sys.stderr)
    return EXIT_OK


def _cmd_fixtures(args, config: dict) -> int:
    print(f"corpus          {toy_corpus_path()}")
    print(f"lexicon         {toy_lexicon_path()}")
    print(f"seed dictionary {toy_seed_dictionary_path()}")
    print(f"suffix rules    {suffix_rules_path()}")
    print(f"abbreviations   {abbreviations_path()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring


def _default_workers() -> int:
    return os.cpu_count() or 1


def build_parser() -> _Parser:
    parser = _Parser(prog="tgec",
                     description="Turkish GEC corpus synthesis and evaluation toolkit")
    parser.add_argument("--config", help="TOML config file; flags override it")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("index", _cmd_index, "build and save the word index of a corpus")
    p.add_argument("--corpus", help="corpus file, one document per line")
    p.add_argument("--jsonl", action="store_true", help="corpus is JSON lines with a 'text' field")
    p.add_argument("--output", required=True, help="index TSV to write")
    p.add_argument("--workers", type=int, default=_default_workers())

    p = add("expand", _cmd_expand, "expand the spelling dictionary to fixpoint")
    p.add_argument("--corpus")
    p.add_argument("--jsonl", action="store_true")
    p.add_argument("--seed-dict", dest="seed_dict", help="seed spelling dictionary TSV")
    p.add_argument("--lexicon", help="analyzability wordlist")
    p.add_argument("--suffix-rules", dest="suffix_rules")
    p.add_argument("--max-iterations", dest="max_iterations", type=int)
    p.add_argument("--deasciify-cap", dest="deasciify_cap", type=int)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--no-figures", dest="no_figures", action="store_true",
                   help="skip rendering report figures")
    p.add_argument("--workers", type=int, default=_default_workers())

    p = add("insert", _cmd_insert, "apply clean insertions to build a parallel corpus")
    p.add_argument("--input", required=True, help="text to correct, one document per line")
    p.add_argument("--jsonl", action="store_true")
    p.add_argument("--dict", help="spelling dictionary TSV")
    p.add_argument("--output", required=True, help="parallel TSV to write")
    p.add_argument("--m2", help="optional M2 sidecar with the applied edits")
    p.add_argument("--no-split", dest="no_split", action="store_true",
                   help="input lines are already sentences; skip sentence splitting")
    p.add_argument("--abbreviations", help="sentence splitter stop-list")
    p.add_argument("--workers", type=int, default=_default_workers())

    p = add("annotate", _cmd_annotate, "correct sentences through an LLM endpoint")
    p.add_argument("--input", required=True, help="sentences, one per line")
    p.add_argument("--checkpoint", required=True, help="append-only journal for resuming")
    p.add_argument("--output", required=True, help="parallel TSV to write")
    p.add_argument("--rejects", required=True, help="sidecar listing non-ok ids")
    p.add_argument("--base-url", dest="base_url")
    p.add_argument("--model")
    p.add_argument("--api-key-env", dest="api_key_env")
    p.add_argument("--concurrency", type=int)

    p = add("m2", _cmd_m2, "convert a parallel TSV into an M2 file")
    p.add_argument("--input", required=True, help="source<TAB>corrected TSV")
    p.add_argument("--output", required=True, help="M2 file to write")

    p = add("score", _cmd_score, "score a hypothesis M2 file against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--mode", choices=gecscore.SCORE_MODES)
    p.add_argument("--report-dir", dest="report_dir",
                   help="also write scores.tsv and a figure here")

    p = add("postprocess-tweets", _cmd_postprocess_tweets,
            "capitalize gold sentences, strip punctuation from hypotheses")
    p.add_argument("--gold", required=True)
    p.add_argument("--hyp", required=True)
    p.add_argument("--gold-out", dest="gold_out", required=True)
    p.add_argument("--hyp-out", dest="hyp_out", required=True)

    p = add("stats", _cmd_stats, "summarize a corpus and/or dictionary")
    p.add_argument("--corpus")
    p.add_argument("--jsonl", action="store_true")
    p.add_argument("--dict")
    p.add_argument("--output", help="also write the table as TSV")

    add("fixtures", _cmd_fixtures, "print the paths of the bundled toy fixtures")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return EXIT_USAGE
        config = load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
