import math

import numpy as np
import pytest

from illumcone.geometry import optimum_params


@pytest.fixture(scope="session")
def opt():
    return optimum_params()


def random_rotation(n, seed):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def pair_at(theta, n=3):
    """Two unit vectors in R^n at spherical distance theta."""
    x = np.zeros(n)
    y = np.zeros(n)
    x[0] = 1.0
    y[0], y[1] = math.cos(theta), math.sin(theta)
    return x, y


ACCEPTANCE = []


def record(criterion, passed, detail):
    ACCEPTANCE.append((criterion, passed, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
