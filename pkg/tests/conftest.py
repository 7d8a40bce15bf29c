from typing import Optional

import pytest

from toporesolve import fixture_path, load_corpus, load_fixture_gazetteer


@pytest.fixture(scope="session")
def g():
    return load_fixture_gazetteer()


@pytest.fixture(scope="session")
def corpus():
    with fixture_path("fixture_corpus.json").open(encoding="utf-8") as fh:
        return load_corpus(fh)


@pytest.fixture(scope="session")
def fixture_lines():
    with fixture_path("fixture_geonames.tsv").open(encoding="utf-8") as fh:
        return fh.read().splitlines(keepends=True)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the line is echoed in the terminal summary."""

    def record(name: str, ok: Optional[bool], detail: str = "") -> Optional[bool]:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"{status}  {name}" + (f"  ({detail})" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
