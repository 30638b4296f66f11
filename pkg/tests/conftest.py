import numpy as np
import pytest

from steerkit import group_core


def random_rotation(rng, d=3):
    """Haar-random rotation matrix in SO(d)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_euler(rng):
    return group_core.matrix_to_euler(random_rotation(rng, 3))


def random_unit(rng, n, d):
    s = rng.standard_normal((n, d))
    return s / np.linalg.norm(s, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)




def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
