"""Containment of ellipsotopes: radii, relaxations, certificates and safe-set design."""

__version__ = "0.1.0"
