"""Shared pytest hooks.

The acceptance tests record one verdict line per criterion; replaying them
in the terminal summary keeps every PASS/FAIL visible even under pytest's
file-descriptor capture, which otherwise swallows output of passing tests.
"""

CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
