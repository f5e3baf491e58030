"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""
import pytest

_results = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _results.setdefault(number, {"title": title, "ok": True, "ran": False})
    if call.when == "call":
        entry["ran"] = True
        if call.excinfo is not None:
            entry["ok"] = False
    elif call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        status = "PASS" if entry["ok"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}")
