import sys
import numpy as np
import pytest
from scipy import integrate


def integrate_halfline(fn, upper=np.inf):
    """Integrate fn over [0, upper] on log-spaced pieces (heavy tails need it)."""
    edges = [0.0] + [10.0**k for k in range(-3, 60)]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        if a >= upper:
            break
        b = min(b, upper)
        total += integrate.quad(fn, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = mod.pytest_acceptance_lines() if mod is not None else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
