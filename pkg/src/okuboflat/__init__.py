"""Generalized Okubo systems, isomonodromic deformations and flat structures."""

from .matkit import DEFAULT_TOL, JordanSpec, Tolerances, jordanize, solve_sylvester_gauge

__version__ = "0.1.0"

__all__ = ["DEFAULT_TOL", "JordanSpec", "Tolerances", "jordanize", "solve_sylvester_gauge"]
