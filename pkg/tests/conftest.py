import numpy as np
import pytest

from qswitch import qcore

SEED = 1729

_acceptance: list[tuple[str, str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(code, title): exit criterion, reported in the summary")


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def psi():
    return qcore.StateVector(np.array([0.6, 0.8j]))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        code, title = marker
        _acceptance.append((code, title, report.outcome.upper(), report.duration))


def pytest_runtest_setup(item):
    m = item.get_closest_marker("acceptance")
    if m:
        item.user_properties.append(("acceptance", m.args))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for code, title, outcome, duration in sorted(_acceptance, key=lambda r: int(r[0][2:])):
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{code:<5} {verdict}  {title}  ({duration:.2f}s)")
