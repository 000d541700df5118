"""Integral points near perfect powers: exact and smoothed counting,
oscillatory dual sums, and the associated exponential sum families."""

__version__ = "0.1.0"
