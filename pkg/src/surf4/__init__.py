"""Curvature invariants and line fields for surfaces in R^4."""

__version__ = "0.1.0"
