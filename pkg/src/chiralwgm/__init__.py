"""Chiral light-matter interaction in whispering-gallery-mode resonators."""

__version__ = "0.1.0"
