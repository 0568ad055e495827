import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

REPO = Path(__file__).resolve().parents[1]

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for entry in _criteria.values():
        if report.nodeid in entry["nodeids"]:
            entry["outcomes"].append((report.nodeid, report.outcome, hasattr(report, "wasxfail")))


def pytest_itemcollected(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        number, title = mark.args
        entry = _criteria.setdefault(number, {"title": title, "outcomes": [], "nodeids": set()})
        entry["nodeids"].add(item.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" and not xf for _, o, xf in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status:7s} {entry['title']}")


@pytest.fixture(scope="session")
def repo_root():
    return REPO
