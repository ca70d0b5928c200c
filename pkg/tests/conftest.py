import mpmath
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def mp_precision():
    # every oracle comparison runs at 40 digits, whatever ran before
    with mpmath.workdps(40):
        yield


@pytest.fixture
def report(capsys):
    """Print one acceptance line straight to the terminal and keep it for the summary."""

    def emit(line: str):
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
