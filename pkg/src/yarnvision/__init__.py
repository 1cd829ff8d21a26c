"""Yarn image metrology toolkit."""
__version__ = "0.1.0"
