"""Digit-sum experiments: s_q(n) versus s_q(n^2)."""

__version__ = "0.1.0"
