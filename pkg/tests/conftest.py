import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shallowflow.grid import FlowState, StructuredGrid, Topography

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("stress", deadline=None, max_examples=1500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def row_grid():
    return StructuredGrid(10, 1, 0.1, 0.1)


def lake(grid, z, eta):
    """Padded state and topography of still water at level ``eta``."""
    topo = Topography.from_interior(grid, z)
    h = np.maximum(eta - np.asarray(z, dtype=float), 0.0)
    return FlowState.from_interior(grid, h), topo


# criterion number -> PASS/FAIL line, filled by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
