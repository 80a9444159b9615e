import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from phrasetrans import load_dictionary, load_ngrams  # noqa: E402

DATA = HERE / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def khoa_lex():
    return load_dictionary(DATA / "khoa_dict.tsv")


@pytest.fixture(scope="session")
def khoa_index():
    return load_ngrams([DATA / "khoa_ngrams.tsv"])


@pytest.fixture(scope="session")
def eval_lex():
    return load_dictionary(DATA / "eval_dict.tsv")


@pytest.fixture(scope="session")
def eval_index():
    return load_ngrams([DATA / "eval_ngrams.tsv"])


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        lines.append(f"[{'PASS' if ok else 'FAIL'}] #{number} {title}: {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
