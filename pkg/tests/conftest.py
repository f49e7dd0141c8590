import functools

import pytest
from hypothesis import settings

from bpriv import fock
from bpriv.channel import ChannelParams, InputPolicy

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def oracle_run(eta: float, r: float, s: float, n_eff: float, D: int, quad: int = 7):
    """Oracle runs are slow; share them between test modules."""
    return fock.run_oracle(InputPolicy(r, n_eff), ChannelParams(eta, s), D, quad)


@pytest.fixture(scope="session")
def oracle():
    return oracle_run


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
