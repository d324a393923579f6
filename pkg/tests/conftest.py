from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "corpus"


@pytest.fixture(scope="session")
def verrocchio_dir() -> Path:
    return FIXTURES / "verrocchio"


@pytest.fixture(scope="session")
def blank_dir() -> Path:
    return FIXTURES / "blank"
