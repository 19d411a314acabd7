import json
import os
import sys

import pytest
from hypothesis import settings

from corpusfuzz.features import default_catalog

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def load_fixture(name):
    with open(os.path.join(FIXTURES, name), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


# ---------------------------------------------------------------- acceptance
_ACCEPTANCE = {}
_DURATIONS = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    number = int(name.split("_")[2])
    detail = dict(report.user_properties).get("detail", "")
    _DURATIONS[number] = _DURATIONS.get(number, 0.0) + report.duration
    if report.when == "call" or report.outcome != "passed":
        if report.skipped:
            outcome = "SKIP"
            reason = report.longrepr[-1] if isinstance(report.longrepr, tuple) else ""
            detail = detail or str(reason)
        else:
            outcome = "PASS" if report.passed else "FAIL"
        _ACCEPTANCE[number] = (outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        outcome, detail = _ACCEPTANCE[n]
        seconds = _DURATIONS.get(n, 0.0)
        terminalreporter.write_line(f"criterion {n:2d}: {outcome}  ({seconds:.1f}s) {detail}")
