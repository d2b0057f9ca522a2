"""Expansions in non-integer bases over the alphabet {0..m}."""

__version__ = "0.1.0"
