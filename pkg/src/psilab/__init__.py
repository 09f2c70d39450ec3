"""Finite, certified experiments with almost disjoint families and Psi-spaces."""
__version__ = "0.1.0"
