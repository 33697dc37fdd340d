"""Desk-scale numerics for Rydberg atom-ion molecules in Paul traps."""

__version__ = "0.1.0"
