import numpy as np
import pytest

from cavity_esd.kernels import SystemParams

# parameter sets of the published surfaces, as (omega0/g, delta/g)
FIGURE_PARAMS = [(1.5, 0.0), (3.0, 0.0), (30.0, 0.0), (2.0, 0.0), (3.5, 0.0), (40.0, 0.0), (10.0, 1.0)]


@pytest.fixture
def gt_grid():
    return np.round(np.arange(0, 2501) * 0.01, 10)


@pytest.fixture(params=FIGURE_PARAMS, ids=lambda p: f"w0={p[0]:g},d={p[1]:g}")
def figure_params(request):
    omega0, delta = request.param
    return SystemParams.from_detuning(omega0, delta)


def random_density(rng, n=4):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_x_state(rng):
    d = rng.dirichlet(np.ones(4))
    rho = np.diag(d).astype(complex)
    a = rng.uniform(0, 1) * np.sqrt(d[0] * d[3]) * np.exp(2j * np.pi * rng.uniform())
    b = rng.uniform(0, 1) * np.sqrt(d[1] * d[2]) * np.exp(2j * np.pi * rng.uniform())
    rho[0, 3], rho[3, 0] = a, np.conj(a)
    rho[1, 2], rho[2, 1] = b, np.conj(b)
    return rho


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
