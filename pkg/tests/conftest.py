import pytest

_LINES: dict[int, str] = {}


class Criterion:
    """Records one acceptance line; ``check`` asserts after recording."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title

    def check(self, ok: bool, detail: str):
        _LINES[self.number] = f"[{'PASS' if ok else 'FAIL'}] criterion {self.number:>2}: {self.title} | {detail}"
        print(_LINES[self.number])
        assert ok, detail


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        terminalreporter.write_line(_LINES[number])
