"""Pytest configuration for tests."""

import numpy as np
import pytest

from spectral_hirota.functions import gaussian, sample_on_grid
from spectral_hirota.types import GridFunction, QuadratureSpec

# No async plugin needed since we're using sync tests with anyio.run()


@pytest.fixture
def quad() -> QuadratureSpec:
    """Default quadrature parameters."""
    return QuadratureSpec()


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so random inputs are reproducible."""
    return np.random.default_rng(42)


@pytest.fixture
def gaussian_grid() -> GridFunction:
    """exp(-x^2) on [-20, 20) with 512 points."""
    return sample_on_grid(gaussian(), 20.0, 512)
