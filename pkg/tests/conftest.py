import numpy as np
import pytest

from nonlocality_lab.correlation_engine import random_direction, random_state
from nonlocality_lab.spin_observables import observable_from_direction


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def haar_state(rng, dim=4):
    return random_state(dim, rng)


def random_observable(rng, party, n_parties=2):
    return observable_from_direction(random_direction(rng), party, n_parties)


# pass/fail lines recorded by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
