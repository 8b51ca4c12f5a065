import numpy as np
import pytest

from qspeed.cli import PRESETS
from qspeed.linalg import Hamiltonian


@pytest.fixture
def h_lt2():
    return Hamiltonian(PRESETS["gamma-lt2"])


@pytest.fixture
def h_ge2():
    return Hamiltonian(PRESETS["gamma-ge2"])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(d, rng, rank=None):
    rank = d if rank is None else rank
    A = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def random_energies(d, rng):
    return np.sort(rng.uniform(-2, 2, d))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[n])
