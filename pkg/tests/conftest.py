import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from areabilliard.billiard import MapConfig  # noqa: E402
from areabilliard.geometry import house_pentagon, regular_polygon, unit_square, validate_polygon  # noqa: E402

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        number, title = mark.args
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _CRITERIA.append((number, title, status, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, duration in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({duration:.1f} s)")


@pytest.fixture
def square():
    return unit_square()


@pytest.fixture
def pentagon():
    return regular_polygon(5)


@pytest.fixture
def house():
    return house_pentagon()


@pytest.fixture
def quad():
    return validate_polygon([(0, 0), (4, 0), (4, 1), (0, 2)])


@pytest.fixture
def square_cfg(square):
    return MapConfig(square, 0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
