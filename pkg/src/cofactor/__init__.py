"""Cofactor conditions and supercompatibility of martensitic transformations."""
__version__ = "0.1.0"
