# kerrpairs/io/__init__.py
"""Curve-file output."""
