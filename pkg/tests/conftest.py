import pathlib
import sys

import pytest

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

ROOT = pathlib.Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"

_RESULTS: list[tuple[int, bool, str]] = []


@pytest.fixture
def programs() -> pathlib.Path:
    return PROGRAMS


@pytest.fixture
def report():
    """Record one acceptance line: ``report(n, ok, detail)``."""

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
        print(line)
        _RESULTS.append((n, ok, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(_RESULTS):
        terminalreporter.write_line(line)
