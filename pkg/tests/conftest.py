"""Shared test plumbing: the acceptance suite records one line per criterion
here and a terminal-summary hook prints them after the run (pytest captures
stdout, so plain prints inside tests would only surface on failure)."""

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
