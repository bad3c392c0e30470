import pytest

from listintersect.params import EnsembleParams, TestParams

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def four_studies():
    return EnsembleParams(4, 10_000)


@pytest.fixture
def six_studies():
    return EnsembleParams(6, 10_000)


@pytest.fixture
def erg_test():
    return TestParams(81, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
