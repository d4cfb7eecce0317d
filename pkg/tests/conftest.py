import numpy as np
import pytest

from dipoletomo.dynamics import IntegratorConfig
from dipoletomo.potential import CompactBump
from dipoletomo.scattering import radial_table

SIGMA = 0.1
RHO = 2.0 * np.pi

_REPORT_LINES = []


@pytest.fixture(scope="session")
def report():
    """Collector for the one-line-per-criterion acceptance summary."""
    def add(line):
        _REPORT_LINES.append(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table_cache():
    """Memoized N=400 radial tables for the compact bump family."""
    cache = {}

    def get(strength=0.01, kappa=8.0, N=400, cfg=IntegratorConfig()):
        key = (strength, kappa, N, cfg.rel_tol, cfg.abs_tol)
        if key not in cache:
            pot = CompactBump(strength, 0.5, kappa)
            cache[key] = radial_table(pot, SIGMA, RHO, N, cfg=cfg)
        return cache[key]

    return get
