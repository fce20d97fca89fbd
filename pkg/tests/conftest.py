import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from sltnf.parser import parse_program

FIXTURES = Path(__file__).parent / "fixtures"
P1_PATH = FIXTURES / "p1.pl"


@pytest.fixture(scope="session")
def p1():
    return parse_program(P1_PATH.read_text(encoding="utf-8"))


ACCEPTANCE = pytest.StashKey[list]()


class _Recorder:
    def __init__(self, config):
        self.lines = config.stash.setdefault(ACCEPTANCE, [])

    @contextmanager
    def __call__(self, number: int, title: str):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            self._add(number, title, "FAIL", start)
            raise
        self._add(number, title, "PASS", start)

    def _add(self, number, title, verdict, start):
        line = f"criterion {number} {verdict}: {title} ({time.perf_counter() - start:.2f}s)"
        self.lines.append(line)
        print(line)


@pytest.fixture
def criterion(request):
    """Context manager recording one pass/fail line per acceptance criterion."""
    return _Recorder(request.config)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
