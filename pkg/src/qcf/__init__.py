"""Workbench for constant-dimension subspace codes in PG(6,2) with prescribed automorphisms."""

__version__ = "0.1.0"
