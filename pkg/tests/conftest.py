import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion with a runtime limit in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title, limit = mark.args
    _CRITERIA[number] = (title, report.passed, report.duration, limit)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, duration, limit = _CRITERIA[number]
        budget = f"limit {limit:g}s" if limit else "no limit"
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'}  criterion {number:2d}  {title}  ({duration:.2f}s, {budget})"
        )
