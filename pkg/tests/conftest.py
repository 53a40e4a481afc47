import pytest

from psrl import fixtures
from psrl.evalkit import Sample


@pytest.fixture
def fig1c():
    return fixtures.two_state_negative()


@pytest.fixture
def signs():
    return fixtures.alternating_signs()


@pytest.fixture
def fig2():
    return fixtures.nonrational_pair()


@pytest.fixture
def fig3():
    return fixtures.golden_ma()


@pytest.fixture
def geometric():
    return fixtures.geometric()


@pytest.fixture
def worked_sample():
    return Sample.from_symbols(["a"], fixtures.worked_sample_words())


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
