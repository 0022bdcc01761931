"""Counterfactual object importance for driving scenes."""

__version__ = "0.1.0"
