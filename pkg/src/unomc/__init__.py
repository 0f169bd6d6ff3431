"""Seeded UNO tournament harness with Monte Carlo decision scoring."""

__version__ = "0.1.0"
