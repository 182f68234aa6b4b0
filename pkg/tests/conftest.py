import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.linalg import expm

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def expm_displacement(alpha, dim):
    """Oracle: exponential of the truncated generator alpha a^dag - conj(alpha) a."""
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return expm(alpha * a.T - np.conj(alpha) * a)


def parity_sum(probs):
    """Oracle: 2 * sum (-1)^n P_n by plain summation."""
    return 2.0 * sum((-1) ** n * p for n, p in enumerate(probs))


@pytest.fixture
def acceptance_report():
    def report(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
