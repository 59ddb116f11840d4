import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fcm_5node_path() -> Path:
    return FIXTURES / "fcms" / "hallucination-5node.json"


@pytest.fixture(scope="session")
def transcripts_dir() -> Path:
    return FIXTURES / "transcripts"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return FIXTURES / "corpus"


@pytest.fixture(scope="session")
def loop_run_dir() -> Path:
    return FIXTURES / "loop_run"


@pytest.fixture(scope="session")
def hallucination_doc_path() -> Path:
    return FIXTURES / "docs" / "hallucination.txt"
