"""Reduced quadratic irrationals: enumeration, transfer operators and their statistics."""

__version__ = "0.1.0"
