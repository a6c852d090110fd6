import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion and assert it."""

    def record(number: int, title: str, checks: dict[str, bool], detail: str = ""):
        ok = all(checks.values())
        failed = [name for name, good in checks.items() if not good]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title}"
        if detail:
            line += f" | {detail}"
        if failed:
            line += f" | failed: {', '.join(failed)}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
