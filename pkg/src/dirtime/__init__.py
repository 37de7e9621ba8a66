"""Directional minimal time functions: exact evaluation, generalized
derivatives, Lipschitz certificates and a location-problem solver."""

__version__ = "0.1.0"
