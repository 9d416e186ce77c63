"""Stochastic simulation of discrete belief networks."""

__version__ = "0.1.0"
