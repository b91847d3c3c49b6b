"""
Pytest configuration and fixtures for choidynamics tests.
"""

import numpy as np
import pytest


def pytest_addoption(parser):
    """Add command-line options for the acceptance sweeps."""
    parser.addoption(
        "--sweep-step",
        action="store",
        default="0.25",
        help="Grid step of the analytic/numerical agreement sweep",
    )
    parser.addoption(
        "--seed",
        action="store",
        default=20240611,
        type=int,
        help="Seed for randomized tests",
    )


@pytest.fixture
def sweep_step(request):
    """Get the sweep step from command line or use default."""
    return request.config.getoption("--sweep-step")


@pytest.fixture
def seed(request):
    """Get the random seed from command line or use default."""
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    """A seeded numpy Generator."""
    return np.random.default_rng(seed)


@pytest.fixture
def tol():
    """Tolerance used by the acceptance checks."""
    return 1e-9
