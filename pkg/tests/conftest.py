import math

import numpy as np
import pytest

from cme.core import CosineSquareForm


def random_form(rng, n, omega=None):
    omega = rng.uniform(0.3, 2.0) if omega is None else omega
    return CosineSquareForm.from_phis(omega, rng.uniform(-math.pi, math.pi, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel_err(x, y):
    return abs((x - y) / y)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
