"""Morse-Bott monopole Floer chain complexes over GF(2) with a Pin(2) layer."""

__version__ = "0.1.0"
