"""Vibronic g-matrix corrections and Landau-Zener tunnelling for lanthanide Kramers doublets."""

__version__ = "0.1.0"
