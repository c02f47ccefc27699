"""Mixing, correlations and light cones of open quantum lattice systems."""

from ._core import *  # noqa: F401,F403
from ._core import Error, InputError, NumericalError, models

__all__ = [name for name in dir() if not name.startswith("_")]
