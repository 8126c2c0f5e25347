"""Version information for spectral-hirota."""

__version__ = "0.1.0"
