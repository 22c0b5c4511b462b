"""Shared fixtures and the per-criterion summary printer."""

import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion.

    Usage: criterion(5, passed, "accuracy 0.95, depth 4, ...").  The lines
    are echoed in the terminal summary so every run shows one pass/fail line
    per criterion.
    """

    def record(number, passed, detail=""):
        _CRITERIA[number] = (passed, detail)
        assert passed, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict} - {detail}")
