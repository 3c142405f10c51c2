"""Exact-arithmetic classification of invariant level tensors on classical
root data, centralizer extension obstructions, and finite cocycle
cohomology."""

__version__ = "0.1.0"
