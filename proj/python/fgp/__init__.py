"""Gaussian-process fractal geometry laboratory.

Thin python wrapper over the C++ core `_fgp` extension: variance profiles,
path simulation, metric geometry, Cantor-type constructions, dimension
estimators and the Monte Carlo hitting lab.
"""

from ._fgp import *  # noqa: F401,F403
from ._fgp import __version__  # noqa: F401
