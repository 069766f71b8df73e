import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20210711)


def random_center(rng, n, lo=0.1, hi=10.0):
    return rng.uniform(lo, hi, size=n)


def laplace_det(M):
    """Cofactor expansion along the first row; exponential, only for tiny matrices."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 1:
        return M[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(M, 0, axis=0), j, axis=1)
        total += (-1) ** j * M[0, j] * laplace_det(minor)
    return total


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
