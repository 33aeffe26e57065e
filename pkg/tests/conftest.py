"""Shared fixtures and the acceptance-criteria terminal report."""
import re

import pytest

_criteria_lines: list[str] = []


@pytest.fixture(scope="session")
def criteria():
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def record(num: int, ok: bool, text: str) -> None:
        _criteria_lines.append(
            f"criterion {num}: {'PASS' if ok else 'FAIL'} - {text}")
        assert ok, f"criterion {num}: {text}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria_lines:
        return
    terminalreporter.section("acceptance criteria")
    def key(line):
        return int(re.match(r"criterion (\d+)", line).group(1))
    for line in sorted(_criteria_lines, key=key):
        terminalreporter.line(line)
