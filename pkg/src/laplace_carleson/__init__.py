"""Numerical workbench for Laplace-Carleson embeddings and weighted Fourier inequalities."""
__version__ = "0.1.0"
