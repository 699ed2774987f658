import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

#: One line per acceptance criterion, filled in by ``test_acceptance``.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
