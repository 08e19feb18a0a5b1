"""Hierarchical reasoning in local theory extensions.

Ground satisfiability by reduction to a base theory, symbol elimination
for parameter constraints, and ground interpolation.
"""
__version__ = "0.1.0"
