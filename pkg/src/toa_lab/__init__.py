"""Numerical laboratory for quantum time-of-arrival models with physical clocks."""

__version__ = "0.1.0"
