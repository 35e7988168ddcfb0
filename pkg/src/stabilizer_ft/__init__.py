"""Stabilizer FT - stabilizer codes, Clifford maps and fault-tolerant gate analysis."""

__version__ = "0.1.0"
