import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from coarsegroups import abelian

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile("suite")

# every Smith normal form computed anywhere in the suite is checked exactly
abelian.set_check_mode(True)

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


@pytest.fixture
def acceptance():
    return record


def pytest_sessionfinish(session, exitstatus):
    if abelian.snf_call_count() != abelian.snf_verified_count():
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter):
    calls, verified = abelian.snf_call_count(), abelian.snf_verified_count()
    if 8 in ACCEPTANCE:
        ACCEPTANCE[8] = (ACCEPTANCE[8][0] and calls == verified, f"{verified} of {calls} SNF calls in the whole suite verified exactly")
    terminalreporter.section("SNF postconditions")
    terminalreporter.write_line(f"{verified} of {calls} Smith normal form calls verified exactly")
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            ok, detail = ACCEPTANCE[n]
            terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
