"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_outcomes: dict[int, tuple[str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.skipped:
        return
    if report.when == "call" or report.failed:
        number, title = marker.args
        ok = report.passed and _outcomes.get(number, (title, True))[1]
        _outcomes[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, ok = _outcomes[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}")
