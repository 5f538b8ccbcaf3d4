"""Exact Stanley depth and regularity for monomial ideals of Borel type."""

__version__ = "0.1.0"
