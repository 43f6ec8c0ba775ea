from pathlib import Path

import pytest

from tgec.lexicon import load_dictionary
from tgec.morphology import AnalyzabilityOracle
from tgec.resources import (
    suffix_rules_path,
    toy_corpus_path,
    toy_lexicon_path,
    toy_seed_dictionary_path,
)


@pytest.fixture(scope="session")
def toy_lexicon_words() -> list[str]:
    return toy_lexicon_path().read_text(encoding="utf-8").split()


@pytest.fixture(scope="session")
def toy_oracle() -> AnalyzabilityOracle:
    return AnalyzabilityOracle.from_files(toy_lexicon_path(), suffix_rules_path())


@pytest.fixture(scope="session")
def toy_corpus_file() -> Path:
    return toy_corpus_path()


@pytest.fixture(scope="session")
def toy_seed_file() -> Path:
    return toy_seed_dictionary_path()


@pytest.fixture(scope="session")
def toy_seed_dictionary(toy_seed_file):
    return load_dictionary(toy_seed_file).dictionary
