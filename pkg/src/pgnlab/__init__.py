"""Parametric geometry of numbers laboratory."""
