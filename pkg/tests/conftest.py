import pytest

ACCEPTANCE: list[tuple[int, str, bool]] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""
    def record(number: int, title: str, ok: bool) -> None:
        ACCEPTANCE.append((number, title, bool(ok)))
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {title}")
        assert ok, f"criterion {number} failed: {title}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria (exact)")
    for number, title, ok in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}")
