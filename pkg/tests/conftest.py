import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from needshare import Problem  # noqa: E402

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion, reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.append((marker.args[0], item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, name, outcome in _criteria:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {label}  ({name})")


@pytest.fixture
def example1():
    return Problem((1, 2, 3, 4), (21, 1, 10, 10), (1, 1, 5, 5))


@pytest.fixture
def zstar_pair():
    return Problem((1, 2), (0, 2), (1, 0))
