"""High-accuracy evaluation of zeta, chi, theta and the Z function."""

from .core import *  # noqa: F401,F403
from .core import __all__  # noqa: F401
