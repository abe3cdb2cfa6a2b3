import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collector for one pass/fail line per acceptance criterion."""

    def record(criterion: str, passed: bool, detail: str):
        _ACCEPTANCE_LINES.append(
            f"[{'PASS' if passed else 'FAIL'}] acceptance {criterion}: {detail}"
        )

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
