"""Zeta-function extrema, zeros and moments on the critical line."""

from .config import PrecisionConfig

__version__ = "0.1.0"

__all__ = ["PrecisionConfig", "__version__"]
