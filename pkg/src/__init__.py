"""Phasefn: nonoscillatory phase functions for y'' + lambda^2 q y = 0."""

__version__ = "1.0.0"
