import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def naive_sq_distances(Z):
    Z = np.asarray(Z, dtype=float)
    n = Z.shape[0]
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for t in range(Z.shape[1]):
                s += (Z[i, t] - Z[j, t]) ** 2
            D[i, j] = s
    return D


# One line per acceptance criterion, printed at the end of the session.
ACCEPTANCE_LINES = []


def record_criterion(number, passed, detail, status=None):
    status = status or ("PASS" if passed else "FAIL")
    line = f"[criterion {number:>2}] {status}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
