import numpy as np
import pytest

from regshift import Dataset, ResponseTransform, SimulationSpec, simulate_bimodal

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Replay the acceptance one-liners after the run, outside capture."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def bimodal200():
    """A fixed draw from the synthetic bimodal model, n=200."""
    return simulate_bimodal(SimulationSpec(n=200, seed=1))


@pytest.fixture
def t1():
    return ResponseTransform("t1")


@pytest.fixture
def t2():
    return ResponseTransform("t2")


def uniform_dataset(n, d, seed, lo=-2.0, hi=2.0, response=None, noise=0.0):
    """Uniform design with an optional closed-form response surface."""
    rng = np.random.Generator(np.random.Philox(seed))
    x = rng.uniform(lo, hi, size=(n, d))
    if response is None:
        y = rng.normal(0.0, 1.0, size=n)
    else:
        y = response(x)
    if noise:
        y = y + rng.normal(0.0, noise, size=n)
    return Dataset(x=x, y=y)
