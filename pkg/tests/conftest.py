import numpy as np
import pytest

from gramsense import build_chain, solve_modes

# 50-mass chain, C = alpha*M + beta*K
REFERENCE_CHAIN = dict(n=50, mass_each=2.0, stiffness_each=2e6, alpha=1e-4, beta=1e-3)
# Same chain with the two coefficients exchanged: MOF ~0.15 at 0.95*w5, ~1.5 at 10x damping
LOW_MOF_CHAIN = dict(n=50, mass_each=2.0, stiffness_each=2e6, alpha=1e-3, beta=1e-4)


@pytest.fixture(scope="session")
def chain():
    return build_chain(**REFERENCE_CHAIN)


@pytest.fixture(scope="session")
def chain_modal(chain):
    return solve_modes(chain)


@pytest.fixture(scope="session")
def low_mof_chain():
    return build_chain(**LOW_MOF_CHAIN)


@pytest.fixture(scope="session")
def low_mof_modal(low_mof_chain):
    return solve_modes(low_mof_chain)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record a one-line verdict for the acceptance summary, then assert it."""

    def check(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        _CRITERIA.append(line)
        print(line)
        assert ok, detail

    return check


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
