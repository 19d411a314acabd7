"""Corpus-guided Csmith configuration synthesis and differential compiler testing."""

__version__ = "0.1.0"
