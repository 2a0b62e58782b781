"""Rotating anisotropic MHD experiments."""

from ._rotmhd import *  # noqa: F401,F403
from ._rotmhd import __doc__  # noqa: F401

__version__ = "0.1.0"
