"""Python bindings for the gatecraft simulation core."""

from gatecraft._core import *  # noqa: F401,F403
from gatecraft._core import __doc__  # noqa: F401

__version__ = "0.1.0"
