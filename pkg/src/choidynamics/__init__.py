"""
choidynamics - Choi-matrix classification of foliated maps on M_3.

Covers the rho, tau and theta map families, their closed-form quantum
dynamical semigroups and PPT transition times, and PPT block matrices built
from tuples of matrices unitarily equivalent to their transposes.
"""

from . import core

__all__ = ["core"]

try:
    from importlib.metadata import version, PackageNotFoundError
    try:
        __version__ = version("choidynamics")
    except PackageNotFoundError:
        __version__ = "0.1.0"
except ImportError:
    __version__ = "0.1.0"
