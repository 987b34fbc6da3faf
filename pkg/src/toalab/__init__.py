"""Numerical laboratory for quantum arrival-time measurement models."""

__version__ = "1.0.0"
