"""Incremental LTLf reactive synthesis."""
__version__ = '0.1.0'
