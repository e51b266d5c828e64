"""Shared pytest wiring.

The acceptance tests record one line per criterion; printing them from a
terminal-summary hook keeps them visible in a plain ``pytest -v`` run,
where per-test stdout would be captured and discarded on success.
"""

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_lines:
        terminalreporter.write_line(line)
