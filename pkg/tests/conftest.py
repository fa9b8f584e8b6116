from pathlib import Path

import pytest
from hypothesis import settings

from mpdo_bounds import presets
from mpdo_bounds.scenario import load_scenario_file

settings.register_profile("repo", deadline=None, derandomize=True, database=None)
settings.load_profile("repo")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sweep_disc():
    return load_scenario_file(DATA / "sweep_disc.json")


@pytest.fixture(scope="session")
def exp1():
    return presets.exp1()


@pytest.fixture(scope="session")
def exp2():
    return presets.exp2()


@pytest.fixture(scope="session")
def exp3():
    return presets.exp3()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
