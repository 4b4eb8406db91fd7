import numpy as np
import pytest

# one line per acceptance criterion, echoed in the terminal summary so the
# pass/fail record survives pytest's stdout capture
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
