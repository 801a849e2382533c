"""Physical constants (CODATA-2018), kept in one place."""

HBAR = 1.054571817e-34
"""Reduced Planck constant [J s]."""

KB = 1.380649e-23
"""Boltzmann constant [J/K] (exact since the 2019 SI redefinition)."""
