"""Radial harmonic analysis on rank-one noncompact symmetric spaces.

Spherical functions, the spherical Fourier transform with its Plancherel
calibration, the fractional Schroedinger propagator with maximal-operator
and convergence experiments, and the Schur-test kernel diagnostics.
"""

__version__ = "0.1.0"

from ._core import BACKEND, HAVE_COMPILED  # noqa: F401
from .space import SpaceParams, make_space, preset  # noqa: F401
