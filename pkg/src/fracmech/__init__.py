"""Fractional-order nonlocal mechanics: RC operators, f-FEM beams and plates,
lattice continualization and anomalous dispersion."""

from .fracops import FractionalOrder, FractionalParams, Horizon

__version__ = "0.1.0"

__all__ = ["FractionalOrder", "FractionalParams", "Horizon", "__version__"]
