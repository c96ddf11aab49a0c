import os
import sys
from pathlib import Path

import pytest

from hybrid_simplex import LpProblem
from hybrid_simplex.engine import add_observer
from hybrid_simplex.lp_core import Status, check_certificate

sys.path.insert(0, str(Path(__file__).parent))

from oracles import CLASSIC_A, CLASSIC_B, CLASSIC_C  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
NETLIB = Path(os.environ.get("HYBRID_SIMPLEX_NETLIB", FIXTURES / "netlib"))

# -- certificate audit: every Optimal solve in the session is checked


class CertificateAudit:
    def __init__(self):
        self.checked = 0
        self.violations = []

    def __call__(self, solution):
        if solution.status is not Status.OPTIMAL:
            return
        self.checked += 1
        ok, problems = check_certificate(solution.standard, solution.tableau)
        if not ok:
            self.violations.append((solution.standard.name, problems[:3]))


AUDIT = CertificateAudit()
add_observer(AUDIT)

# -- acceptance reporting
ACCEPTANCE_RESULTS = {}


def pytest_collection_modifyitems(config, items):
    # acceptance last, so the certificate audit covers the whole suite
    items.sort(key=lambda item: "test_acceptance" in item.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.skipped):
        state = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        previous = ACCEPTANCE_RESULTS.get(name)
        rank = {"FAIL": 2, "SKIP": 1, "PASS": 0}
        if previous is None or rank[state] > rank[previous]:
            ACCEPTANCE_RESULTS[name] = state


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion this test belongs to")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, state in ACCEPTANCE_RESULTS.items():
            terminalreporter.write_line(f"{state}  {name}")
    terminalreporter.write_line(
        f"certificate audit: {AUDIT.checked} optimal solves checked, "
        f"{len(AUDIT.violations)} violations")


def pytest_sessionfinish(session, exitstatus):
    if AUDIT.violations and session.exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture
def classic():
    return LpProblem(CLASSIC_A, CLASSIC_B, CLASSIC_C, name="classic")


@pytest.fixture
def audit():
    return AUDIT

