"""Python bindings for the sensing base station toolkit."""

from ._sbs import *  # noqa: F401,F403
from ._sbs import __version__  # noqa: F401
