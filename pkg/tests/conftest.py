"""Shared fixtures: one big smallest-prime-factor table per session, plus a
terminal hook that reprints the acceptance per-criterion verdict lines."""

import pytest

from densediv import build_spf_table

TABLE_LIMIT = 2_000_010

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table():
    """Session-wide factor table covering every in-process test need."""
    return build_spf_table(TABLE_LIMIT)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria summary")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
