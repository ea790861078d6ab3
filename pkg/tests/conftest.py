import math

import pytest
from hypothesis import HealthCheck, settings

from semifluxon.boundary import CIRCLE, REFERENCE_SHAPE, TABLE_SHAPE

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def circle():
    return CIRCLE


@pytest.fixture
def reference_shape():
    return REFERENCE_SHAPE


@pytest.fixture
def table_shape():
    return TABLE_SHAPE


def close(a, b, tol):
    return abs(a - b) <= tol


PI = math.pi


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
