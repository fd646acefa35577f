import numpy as np
import pytest

from garchmidas.model import CARBON_RV_PARAMS, ParameterSet, simulate_dataset


@pytest.fixture(scope="session")
def carbon_params():
    return ParameterSet(**CARBON_RV_PARAMS)


@pytest.fixture(scope="session")
def carbon_sample(carbon_params):
    """500 months x 22 days simulated at the carbon RV reference point, K = 24."""
    daily, x, panel = simulate_dataset(carbon_params, 500, 22, 24, seed=0)
    return daily, x, panel


@pytest.fixture(scope="session")
def small_sample(carbon_params):
    daily, x, panel = simulate_dataset(carbon_params, 60, 20, 12, seed=7)
    return daily, x, panel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {title}  ({detail})")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES,
                           key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
