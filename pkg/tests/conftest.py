import pytest

from dsgame.game import parse_game

G1_TEXT = """\
discount 2 1
states 2
init 0
owner 0 max
owner 1 min
edge 0 1 2
edge 0 0 1
edge 1 0 0
edge 1 1 -1
"""


@pytest.fixture
def g1():
    return parse_game(G1_TEXT)


@pytest.fixture
def g1_text():
    return G1_TEXT


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, ok, detail)``."""

    def record(n, ok, detail):
        ACCEPTANCE_LINES.append((n, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
