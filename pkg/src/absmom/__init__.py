"""Fractional absolute moments from characteristic functions and Laplace transforms."""

__version__ = "0.1.0"
