"""Numerical isomonodromy toolkit for Heun class equations."""
__version__ = "0.1.0"
