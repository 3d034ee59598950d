"""Symmetry invariance of learning algorithms and identity-rule generalization."""

__version__ = "0.1.0"
