import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lvspread.geometry import DirectionSet

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PI = math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def quarter_cone():
    """Closed arc [-pi/4, pi/4]."""
    return DirectionSet.arc(-PI / 4, PI / 4)


# one summary line per acceptance criterion, printed after the run
_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_ac" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n[7:].split("_")[0])):
        verdict, detail = _ACCEPTANCE[name]
        label = "AC-" + name[7:].split("_")[0]
        terminalreporter.write_line(f"{label} {verdict}: {detail}")
