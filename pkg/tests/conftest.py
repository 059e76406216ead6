import numpy as np
import pytest

from jointpol.io import bundled_path, read_correlations, read_counts_csv

# Published coincidence counts, rows = photon 1 outcome (a, b, c, d).
TABLE3 = np.array([
    [967, 8723, 16658, 17558],
    [10341, 834, 12621, 14248],
    [12521, 16356, 864, 9934],
    [13736, 14248, 9972, 996],
])

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def table3():
    return TABLE3.copy()


@pytest.fixture
def measured_corrs():
    return read_correlations(bundled_path("correlations"))


@pytest.fixture
def bundled_counts():
    return read_counts_csv(bundled_path("counts"))


def random_density(rng, dim=4, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key}: {detail}")
