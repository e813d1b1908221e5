import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import gate  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if gate.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(gate.LINES):
            terminalreporter.write_line(line)
