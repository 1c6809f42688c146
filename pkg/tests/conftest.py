import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from radwave import potentials, steady

settings.register_profile(
    "radwave", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("radwave")


@pytest.fixture(scope="session")
def vstar():
    return potentials.manufactured_star()


@pytest.fixture(scope="session")
def star_census(vstar):
    return steady.census(vstar, A=5.0, step=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
