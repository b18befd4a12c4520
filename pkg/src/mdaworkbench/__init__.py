"""Workbench for maximum domains of attraction."""

__version__ = "0.1.0"
