import pytest

# Lines reported by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def add(number: int, passed: bool, detail: str):
        ACCEPTANCE_LINES.append(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
