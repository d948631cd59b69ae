# kerrpairs/utils/__init__.py
"""Utility functions for kerrpairs."""
