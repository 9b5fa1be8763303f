from __future__ import annotations

import pytest

_VERDICTS: list = []


@pytest.fixture
def verdict():
    """Record one summary line per acceptance criterion; printed after the run."""
    def record(number: int, passed: bool, detail: str) -> None:
        _VERDICTS.append((number, "PASS" if passed else "FAIL", detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, word, detail in sorted(_VERDICTS):
        terminalreporter.write_line(f"criterion {number}: {word}: {detail}")
