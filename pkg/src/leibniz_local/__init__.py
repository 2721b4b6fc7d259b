"""Exact derivation, local-derivation and 2-local-derivation analysis for Leibniz algebras."""

__version__ = "0.1.0"
