import numpy as np
import pytest

from rankeb import Instance

ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    ACCEPTANCE[number] = (title, bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def diag_inst():
    """2x2, r=1, no affine constraint."""
    return Instance.dense(2, 2, 1, np.zeros((0, 4)), [])


@pytest.fixture
def mask11_inst():
    """2x2, r=1, observe entry (1,1) with value 2."""
    return Instance.mask(2, 2, 1, [(1, 1)], [2.0], one_based=True)


def random_stiefel(rng, n, k):
    Q, R = np.linalg.qr(rng.standard_normal((n, k)))
    return Q * np.sign(np.diag(R))
