import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ccrflow.starlinalg import make_form

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def mu03():
    """Single mode with real part = identity and mu = 0.3."""
    return make_form(2, np.array([[0.5, 0.3j], [-0.3j, 0.5]]))


def max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
