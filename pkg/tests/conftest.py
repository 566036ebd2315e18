from fractions import Fraction

import pytest
from hypothesis import settings

from partint.geometry import Box

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# acceptance lines collected by tests/test_acceptance.py, printed at the end
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def unit1():
    return Box((0,), (1,))


@pytest.fixture
def unit2():
    return Box.unit(2)


@pytest.fixture
def half():
    return Fraction(1, 2)
