import numpy as np
import pytest

from ndpos.domains import make_unit_disc
from ndpos.series import LacunarySeries


@pytest.fixture(scope="session")
def g():
    return LacunarySeries.from_ab(0.5, 13)


@pytest.fixture(scope="session")
def disc():
    return make_unit_disc()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one pass/fail line per acceptance criterion in the terminal summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if call.when == "call" or call.excinfo is not None:
        ok = call.excinfo is None
        prev = _CRITERIA.get(n, (True, title))[0]
        _CRITERIA[n] = (prev and ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, title = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")
