"""Precision settings and the exception hierarchy shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass


class ZetaMomentsError(Exception):
    """Base class for errors raised by this package."""


class PoleProximityError(ZetaMomentsError, ValueError):
    """Argument lies within the guard radius of the pole of zeta at s = 1."""


class RangeError(ZetaMomentsError, ValueError):
    """Height outside the supported evaluation range."""


class DomainError(ZetaMomentsError, ValueError):
    """Argument outside the domain an operation is defined on."""


class ChiOverflowError(ZetaMomentsError, OverflowError):
    """|chi(s)| would overflow for the requested real part."""


class ZeroCountError(ZetaMomentsError):
    """Zero census disagrees with the N(T) audit after rescanning."""


class MultipleCriticalPointError(ZetaMomentsError):
    """More than one sign change of Z' found between consecutive zeros."""


class QuadratureError(ZetaMomentsError):
    """Adaptive quadrature failed to meet its tolerance."""


class CacheFormatError(ZetaMomentsError):
    """Zero-cache file is malformed, truncated, or of the wrong version."""


class CoverageError(ZetaMomentsError):
    """A zero cache does not cover the requested height range."""


@dataclass(frozen=True)
class PrecisionConfig:
    """Accuracy targets for evaluation, root refinement and quadrature.

    ``epsilon_slack`` is only a reporting parameter for trend fits.
    """

    rel_tol: float = 1e-10
    abs_floor: float = 1e-11
    max_terms: int = 4_000_000
    epsilon_slack: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1e-4:
            raise ValueError(f"rel_tol must lie in (0, 1e-4), got {self.rel_tol}")
        if not self.abs_floor > 0.0:
            raise ValueError("abs_floor must be positive")
        if self.max_terms < 64:
            raise ValueError("max_terms too small")
        if not 0.0 < self.epsilon_slack < 1.0:
            raise ValueError("epsilon_slack must lie in (0, 1)")


DEFAULT = PrecisionConfig()
