import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PROBLEMS = os.path.join(os.path.dirname(__file__), os.pardir, "problems")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def problem_path(name: str) -> str:
    return os.path.abspath(os.path.join(PROBLEMS, name))


_ACCEPTANCE: list[str] = []


@pytest.fixture
def accept():
    """Record one pass/fail line for an acceptance criterion and fail on a miss."""
    def report(cid: str, title: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {cid} {title}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
