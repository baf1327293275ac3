import pytest

_REPORT = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one line per acceptance criterion for the terminal summary."""

    def record(number, passed, detail):
        _REPORT.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
