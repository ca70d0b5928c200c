"""Euler-Kronecker constants of prime cyclotomic fields and related counts."""

__version__ = "0.1.0"
