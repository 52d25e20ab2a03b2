"""Exact computations for the open XXZ chain at the combinatorial point."""

__version__ = "0.1.0"
