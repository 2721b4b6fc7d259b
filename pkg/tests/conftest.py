import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_labels: dict[str, str] = {}
_outcomes: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.module.__name__.endswith("test_acceptance"):
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _labels[item.nodeid] = doc


def pytest_runtest_logreport(report):
    if report.nodeid not in _labels:
        return
    if report.failed:
        _outcomes[report.nodeid] = "FAIL"
    elif report.when == "call" and report.nodeid not in _outcomes:
        _outcomes[report.nodeid] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _labels:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, label in _labels.items():
        terminalreporter.write_line(f"{_outcomes.get(nodeid, 'NOT RUN'):7} {label}")
