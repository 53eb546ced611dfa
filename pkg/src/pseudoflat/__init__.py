"""Exact point–pseudoflat incidence laboratory."""

__version__ = "0.1.0"
