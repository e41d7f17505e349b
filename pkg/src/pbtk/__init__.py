"""Pseudo-boson, pseudo-fermion and extended pseudo-fermion operator toolkit."""

__version__ = "0.1.0"
