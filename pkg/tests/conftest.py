import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(line)


def _order(line):
    parts = line.split()
    try:
        return (float(parts[2].rstrip(":").replace("b", ".5")), line)
    except (IndexError, ValueError):
        return (99.0, line)
