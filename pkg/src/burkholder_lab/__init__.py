"""Burkholder lab: sharp martingale inequalities, Burkholder's functions and Fourier multipliers."""

__version__ = "0.1.0"
