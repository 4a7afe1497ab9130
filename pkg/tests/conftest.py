import numpy as np
import pytest

from ptband.model import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_params():
    return ModelParams(J=1.0, delta=0.1, gamma=0.1, N=6)


def brute_force_eigenvalues(H):
    """Eigenvalues by LAPACK, sorted by (real, imag)."""
    return np.sort_complex(np.linalg.eigvals(np.asarray(H)))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[i])
