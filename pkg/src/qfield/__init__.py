"""Quaternion electrodynamics with a temporal scalar field.

Submodules
----------
quaternion   value-level quaternion algebra (right/left products)
grid         periodic grids and centered-difference operators
potential    quaternion derivative of the potential, field extraction, residuals
dynamics     time-domain evolution of the seven-component field
thermo       heat ledger, Thomson/Seebeck models, E_T / D / H splits
snapshot     binary snapshot format
cli          ``qfield`` command line
"""

from ._backend import name as backend
from .grid import Grid
from .quaternion import ProductSide, Quaternion

__version__ = "0.1.0"

__all__ = ["Grid", "ProductSide", "Quaternion", "backend", "__version__"]
