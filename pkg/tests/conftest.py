import numpy as np
import pytest

from deconvkde.densities import Gaussian, GaussianError, GaussianMixture, LaplaceError
from deconvkde.kernels import FanKernel, SincKernel


@pytest.fixture
def fan():
    return FanKernel()


@pytest.fixture
def sinc():
    return SincKernel()


@pytest.fixture
def gauss_err():
    return GaussianError()


@pytest.fixture
def laplace_err():
    return LaplaceError()


@pytest.fixture
def std_normal():
    return Gaussian()


@pytest.fixture
def mixture():
    return GaussianMixture(-1.0, 1.0, 0.375, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


TARGETS = [Gaussian(), GaussianMixture(), Gaussian(0.7, 2.5), GaussianMixture(-2.0, 0.5, 0.3, 0.2)]


def monte_carlo_ise(target, kernel, error, n, sigma, h, reps, seed):
    """Average integrated squared error of simulated estimates and its standard error."""
    from deconvkde.deconvolver import EstimateConfig, estimate, make_grid

    grid = make_grid(-8.0, 8.0, 0.01)
    cfg = EstimateConfig(h, sigma, grid)
    truth = target.pdf(grid)
    rng = np.random.default_rng(seed)
    ise = np.empty(reps)
    for j in range(reps):
        x = target.sample(n, rng) + sigma * error.sample(n, rng)
        ise[j] = np.trapezoid((estimate(x, cfg, kernel, error).values - truth) ** 2, grid)
    return ise.mean(), ise.std(ddof=1) / np.sqrt(reps)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion check."""
    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
