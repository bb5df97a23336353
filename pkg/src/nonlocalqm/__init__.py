"""Numerical experiments for minimum-length and nonlocal quantum mechanics."""

__version__ = "0.1.0"
