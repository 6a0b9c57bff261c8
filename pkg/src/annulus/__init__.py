"""Exact-arithmetic workbench for cobar complexes, annular towers and formal groups."""

__version__ = "0.1.0"
