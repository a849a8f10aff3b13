"""Exact N-boson Schroedinger dynamics vs Hartree dynamics on a periodic
1-D lattice, with convergence indicators and explicit error-bound checks."""

from .errors import ConfigError, NumericalFailure
from .lattice import Grid, LatticeField
from .onebody import Orbital

__all__ = ["ConfigError", "NumericalFailure", "Grid", "LatticeField", "Orbital"]
