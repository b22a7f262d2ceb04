import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fezc.mesh import build_hierarchy

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def h1():
    return build_hierarchy(1, 6)


@pytest.fixture(scope="session")
def h2():
    return build_hierarchy(2, 5)


@pytest.fixture(scope="session")
def h2_7():
    return build_hierarchy(2, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
