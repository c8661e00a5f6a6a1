"""Acceptance criteria bookkeeping: one PASS/FAIL line per criterion at the end of the run."""

from __future__ import annotations

import pytest

_outcomes: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark.args
    entry = _outcomes.setdefault(number, {"title": title, "failed": [], "ran": 0})
    if report.when == "call":
        entry["ran"] += 1
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        entry = _outcomes[number]
        ok = entry["ran"] and not entry["failed"]
        status = "PASS" if ok else "FAIL"
        detail = "" if ok else f"  ({', '.join(entry['failed']) or 'not run'})"
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}{detail}")
