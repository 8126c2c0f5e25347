"""Pytest configuration for e2e tests."""

import pytest


@pytest.fixture
def run_dir(tmp_path):
    """Fresh output directory for one CLI run."""
    path = tmp_path / "run"
    path.mkdir()
    return path


def pytest_configure(config):
    """Add e2e marker."""
    config.addinivalue_line("markers", "e2e: slow end-to-end runs of the command-line tool")
