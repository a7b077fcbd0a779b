import numpy as np
import pytest

from nhgyro.systems import chaplygin as ch
from nhgyro.systems import suslov as su

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request, capsys):
    """Record one PASS/FAIL line; shown inline and again in the terminal summary."""

    def log(number, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} [{number:>2}] {title}: {detail}"
        request.config.stash[_ACCEPTANCE_KEY].append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return passed

    return log


@pytest.fixture(scope="session")
def suslov_params():
    return su.SuslovParams()


@pytest.fixture(scope="session")
def suslov(suslov_params):
    return su.suslov_system(suslov_params)


@pytest.fixture(scope="session")
def chap_params():
    return ch.ChaplyginParams()


@pytest.fixture(scope="session")
def chaplygin(chap_params):
    return ch.chaplygin_system(chap_params)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
