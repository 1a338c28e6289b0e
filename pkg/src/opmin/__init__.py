"""Exact homotopy transfer, BV trees, graph cocycles and Maurer-Cartan tools over Q."""

__version__ = "0.1.0"
