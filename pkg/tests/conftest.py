"""Shared pytest wiring for the suite.

The acceptance tests record one verdict line per criterion in
``ACCEPTANCE_VERDICTS``; printing them from a terminal-summary hook keeps
them visible in the final report even though pytest captures stdout at the
file-descriptor level during the tests themselves.
"""

ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.line(line)
