"""Multilevel compressed sensing toolkit."""

from ._mlcs import *  # noqa: F401,F403
from ._mlcs import __doc__  # noqa: F401

__version__ = "0.1.0"
