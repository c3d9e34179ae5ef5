"""Exact linear Koszul duality over fields, computed per internal degree."""

__version__ = "0.1.0"
