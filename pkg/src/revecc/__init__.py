"""Reversible Toffoli networks for elliptic curve point addition."""
__version__ = "0.1.0"
