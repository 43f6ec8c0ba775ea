"""Paths to the data files bundled with the package."""

from importlib import resources
from pathlib import Path


def _data_dir() -> Path:
    return Path(resources.files("tgec")) / "data"


def abbreviations_path() -> Path:
    return _data_dir() / "abbreviations_tr.txt"


def suffix_rules_path() -> Path:
    return _data_dir() / "suffix_rules_tr.tsv"


def toy_corpus_path() -> Path:
    return _data_dir() / "toy" / "corpus.txt"


def toy_lexicon_path() -> Path:
    return _data_dir() / "toy" / "lexicon.txt"


def toy_seed_dictionary_path() -> Path:
    return _data_dir() / "toy" / "seed_dictionary.tsv"
