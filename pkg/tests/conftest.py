import numpy as np
import pytest

from cofactor.symmetry import monoclinic_variants

GENERIC = (1.05, 0.03, 0.93, 1.01)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def generic_variants():
    return monoclinic_variants(*GENERIC)


def random_spd(rng, lo=0.85, hi=1.15):
    from scipy.spatial.transform import Rotation

    lam = np.sort(rng.uniform(lo, hi, 3))
    Q = Rotation.random(random_state=int(rng.integers(2**31))).as_matrix()
    return Q @ np.diag(lam) @ Q.T


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
