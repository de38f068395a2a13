import numpy as np
import pytest
from hypothesis import settings

from dfsqubit.couplings import Geometry

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_geometry(rng, lo=0.05, hi=20.0):
    r = np.exp(rng.uniform(np.log(lo), np.log(hi)))
    return Geometry.from_r_over_lambda(r, rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))


def random_density(rng, dim=16, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def two_level_pair_dissipator(g12):
    """Two two-level atoms with collective rate g12, built from scratch (basis |e>, |g>)."""
    sm = np.array([[0, 0], [1, 0]], dtype=complex)
    i2 = np.eye(2)
    jumps = [np.kron(sm, i2), np.kron(i2, sm)]
    rates = np.array([[1, g12], [g12, 1]])
    n = 4
    out = np.zeros((n * n, n * n), dtype=complex)
    for a, ja in enumerate(jumps):
        for b, jb in enumerate(jumps):
            for k in range(n * n):
                e = np.zeros(n * n)
                e[k] = 1
                rho = e.reshape(n, n)
                term = rates[a, b] * (2 * jb @ rho @ ja.conj().T
                                      - ja.conj().T @ jb @ rho - rho @ ja.conj().T @ jb)
                out[:, k] += term.reshape(-1)
    return out
